// Command-line front end: one subcommand per scenario plus `report`.

#include <iostream>

#include "CLI11.hpp"
#include "zpflab/scenario.hpp"

namespace sc = zpflab::scenario;

namespace {

struct RunArgs {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

void add_run_command(CLI::App& app, sc::Scenario scenario, const std::string& help, RunArgs& args,
                     std::optional<sc::Scenario>& selected) {
  auto* cmd = app.add_subcommand(sc::to_string(scenario), help);
  cmd->add_option("--config,-c", args.config, "Run configuration file")->required();
  cmd->add_option("--out,-o", args.out, "Output directory");
  cmd->add_option("--seed", args.seed, "Override the configured seed");
  cmd->add_flag("--quiet,-q", args.quiet, "Suppress the per-check summary");
  cmd->callback([&selected, scenario] { selected = scenario; });
}

int run_scenario(sc::Scenario scenario, const RunArgs& args) {
  const auto doc = sc::ConfigDocument::load(args.config);
  sc::RunOptions options;
  options.out_dir = args.out;
  options.seed = args.seed;
  options.quiet = args.quiet;
  const auto result = sc::run(scenario, doc, options);
  if (!args.quiet) {
    for (const auto& c : result.checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.check_name;
      if (c.state_index) std::cout << "[" << *c.state_index << "]";
      std::cout << "  value=" << c.value << " target=" << c.target << " tol=" << c.tolerance << "\n";
    }
    std::cout << "manifest: " << (options.out_dir / "manifest.json").string() << "\n";
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zpflab: zero-point field oscillator toolkit"};
  app.require_subcommand(1);

  RunArgs args;
  std::optional<sc::Scenario> selected;
  add_run_command(app, sc::Scenario::field_sample, "Sample a field realization and its correlation", args, selected);
  add_run_command(app, sc::Scenario::simulate, "Integrate driven trajectories and ensemble moments", args, selected);
  add_run_command(app, sc::Scenario::response, "Evaluate susceptibility, its time kernel and KK consistency", args,
                  selected);
  add_run_command(app, sc::Scenario::oracle, "Solve stationary states and transition data", args, selected);
  add_run_command(app, sc::Scenario::verify, "Run the quantum-structure checks", args, selected);

  std::vector<std::string> manifests;
  std::string format = "text";
  auto* rep = app.add_subcommand("report", "Tabulate checks from one or more manifests");
  rep->add_option("manifests", manifests, "manifest.json files")->required();
  rep->add_option("--format", format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (selected) return run_scenario(*selected, args);
    std::vector<std::filesystem::path> paths(manifests.begin(), manifests.end());
    const auto table = sc::report(paths);
    std::cout << (format == "csv" ? table.to_csv() : table.to_text());
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sc::exit_status_for(e);
  }
}
