#include "zpflab/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "zpflab/field.hpp"
#include "zpflab/format.hpp"
#include "zpflab/parallel.hpp"
#include "zpflab/quantum.hpp"
#include "zpflab/response.hpp"
#include "zpflab/rng.hpp"
#include "zpflab/spectral.hpp"
#include "zpflab/trajectory.hpp"

#ifndef ZPFLAB_VERSION
#define ZPFLAB_VERSION "0.0.0"
#endif

namespace zpflab::scenario {

namespace fs = std::filesystem;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "scenario", "seed",
      "units.hbar", "units.m", "units.e",
      "oscillator.omega0", "oscillator.tau", "oscillator.q",
      "potential.kind", "potential.omega0", "potential.coefficients",
      "spectrum.omega_min", "spectrum.omega_max", "spectrum.n_modes", "spectrum.grid",
      "sim.dt", "sim.t_total", "sim.t_burn", "sim.n_trajectories", "sim.integrator", "sim.x0", "sim.p0",
      "sim.write_trajectory",
      "psd.trajectories", "psd.duration", "psd.segment_time", "psd.overlap",
      "grid.x_min", "grid.x_max", "grid.n_points", "grid.method",
      "oracle.n_states",
      "verify.n_states", "verify.n_trunc", "verify.trk_states", "verify.trk_tolerance",
      "verify.trk_convergence", "verify.commutator_tolerance", "verify.r1_tolerance", "verify.r2_tolerance",
      "verify.bohr_states", "verify.bohr_tolerance", "verify.bracket_times", "verify.bracket_tolerance",
      "response.omega_k", "response.gamma_k", "response.omega_min", "response.omega_max", "response.n_points",
      "response.kk_tolerance", "response.dt", "response.t_min", "response.t_max",
      "response.causality_tolerance",
      "field.n_realizations", "field.lags", "field.window", "field.n_samples", "field.t_start",
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Typed access to a config document; every failure names the offending key.
class Reader {
 public:
  explicit Reader(const ConfigDocument& doc) : doc_(doc) {}

  bool has(const std::string& key) const { return doc_.has(key); }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    const auto* v = doc_.find(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ConfigError("missing required field '" + key + "'");
    }
    return parse_double(key, *v);
  }

  std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) const {
    const auto* v = doc_.find(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ConfigError("missing required field '" + key + "'");
    }
    try {
      std::size_t pos = 0;
      const long long n = std::stoll(*v, &pos);
      if (pos != v->size() || n < 0) throw std::invalid_argument("");
      return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
      throw ConfigError("field '" + key + "' must be a non-negative integer, got '" + *v + "'");
    }
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) const {
    const auto* v = doc_.find(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ConfigError("missing required field '" + key + "'");
    }
    return *v;
  }

  bool flag(const std::string& key, bool fallback) const {
    const auto* v = doc_.find(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError("field '" + key + "' must be true or false");
  }

  std::vector<double> list(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt) const {
    const auto* v = doc_.find(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ConfigError("missing required field '" + key + "'");
    }
    std::vector<double> out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    if (out.empty()) throw ConfigError("field '" + key + "' must be a comma-separated list of numbers");
    return out;
  }

  void require_section(const std::string& section, Scenario s) const {
    if (!doc_.has_section(section)) {
      throw ConfigError("scenario '" + to_string(s) + "' requires section '" + section + "'");
    }
  }

 private:
  static double parse_double(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("");
      return d;
    } catch (const std::exception&) {
      throw ConfigError("field '" + key + "' must be a number, got '" + v + "'");
    }
  }

  const ConfigDocument& doc_;
};

struct Context {
  Context(Scenario s, const ConfigDocument& doc, RunOptions opts) : scenario(s), cfg(doc), options(std::move(opts)) {}

  Scenario scenario;
  Reader cfg;
  RunOptions options;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::vector<VerificationCheck> checks;
  std::vector<std::string> outputs;
  nlohmann::json notes = nlohmann::json::object();

  void add(VerificationCheck c) { checks.push_back(std::move(c)); }

  std::ofstream open(const std::string& name) {
    std::ofstream os(options.out_dir / name, std::ios::binary);
    if (!os) throw ConfigError("cannot write output file '" + (options.out_dir / name).string() + "'");
    outputs.push_back(name);
    return os;
  }

  void write_json(const std::string& name, const nlohmann::json& doc) {
    auto os = open(name);
    os << doc.dump(2) << "\n";
  }

  void write_csv(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
    auto os = open(name);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
      os << "\n";
    }
  }
};

response::OscillatorParams oscillator(const Reader& cfg) {
  response::OscillatorParams p;
  p.hbar = cfg.number("units.hbar", 1.0);
  p.m = cfg.number("units.m", 1.0);
  p.e = cfg.number("units.e", 1.0);
  p.omega0 = cfg.number("oscillator.omega0", 1.0);
  if (cfg.has("oscillator.tau") && cfg.has("oscillator.q")) {
    throw ConfigError("give only one of 'oscillator.tau' and 'oscillator.q'");
  }
  if (cfg.has("oscillator.q")) {
    const double q = cfg.number("oscillator.q");
    if (!(q > 0.0)) throw ConfigError("field 'oscillator.q' must be > 0");
    p.tau = 1.0 / (q * p.omega0);
  } else {
    p.tau = cfg.number("oscillator.tau", 0.0);
  }
  p.validate();
  return p;
}

spectral::Units units(const Reader& cfg) {
  return {cfg.number("units.hbar", 1.0), cfg.number("units.m", 1.0)};
}

sim::Potential potential(const Reader& cfg) {
  const auto kind = cfg.text("potential.kind");
  if (kind == "harmonic") {
    const double omega0 = cfg.number("potential.omega0", cfg.number("oscillator.omega0", 1.0));
    return sim::Potential::harmonic(omega0, cfg.number("units.m", 1.0));
  }
  if (kind == "polynomial") return sim::Potential::polynomial(cfg.list("potential.coefficients"));
  throw ConfigError("field 'potential.kind' must be harmonic or polynomial, got '" + kind + "'");
}

field::SpectrumConfig spectrum(const Reader& cfg, double omega0) {
  field::SpectrumConfig s;
  s.omega_min = cfg.number("spectrum.omega_min", omega0 / 5.0);
  s.omega_max = cfg.number("spectrum.omega_max", 5.0 * omega0);
  s.n_modes = cfg.count("spectrum.n_modes", 4096);
  s.hbar = cfg.number("units.hbar", 1.0);
  s.grid = field::grid_from_string(cfg.text("spectrum.grid", "uniform"));
  s.validate();
  return s;
}

spectral::GridSpec grid(const Reader& cfg) {
  spectral::GridSpec g{cfg.number("grid.x_min"), cfg.number("grid.x_max"), cfg.count("grid.n_points")};
  g.validate();
  return g;
}

void run_field_sample(Context& ctx) {
  const auto& cfg = ctx.cfg;
  cfg.require_section("spectrum", ctx.scenario);
  const auto spec = spectrum(cfg, cfg.number("oscillator.omega0", 1.0));
  ctx.write_json("field.json", field::to_json(field::sample_zpf(spec, ctx.seed)));

  const auto lags = cfg.list("field.lags", std::vector<double>{0.0});
  field::CorrelationOptions opt;
  opt.seed = derive_seed(ctx.seed, 1);
  opt.t_start = cfg.number("field.t_start", 0.0);
  opt.window = cfg.number("field.window", 100.0);
  opt.n_samples = cfg.count("field.n_samples", 64);
  const auto est = field::estimate_correlation(spec, cfg.count("field.n_realizations", 64), lags, opt);

  std::vector<std::vector<double>> rows;
  for (const auto& e : est) {
    rows.push_back({e.lag, e.value, e.standard_error, field::discrete_correlation(spec, e.lag),
                    field::continuum_correlation(spec, e.lag)});
    ctx.add(make_check("correlation_vs_continuum", std::nullopt, e.value, field::continuum_correlation(spec, e.lag),
                       3.0 * e.standard_error));
  }
  ctx.write_csv("correlation.csv", {"lag", "corr", "stderr", "discrete_expected", "continuum"}, rows);
}

void run_simulate(Context& ctx) {
  const auto& cfg = ctx.cfg;
  cfg.require_section("potential", ctx.scenario);
  cfg.require_section("spectrum", ctx.scenario);
  cfg.require_section("sim", ctx.scenario);
  if (!ctx.has_seed) throw ConfigError("scenario 'simulate' requires field 'seed' (or --seed)");
  const auto params = oscillator(cfg);
  const auto pot = potential(cfg);
  const auto spec = spectrum(cfg, params.omega0);

  sim::SimConfig sc;
  sc.dt = cfg.number("sim.dt");
  sc.t_total = cfg.number("sim.t_total");
  sc.t_burn = cfg.number("sim.t_burn", params.gamma() > 0.0 ? 5.0 / params.gamma() : 0.0);
  sc.n_trajectories = cfg.count("sim.n_trajectories", 16);
  sc.x0 = cfg.number("sim.x0", 0.0);
  sc.p0 = cfg.number("sim.p0", 0.0);
  sc.seed = ctx.seed;
  if (cfg.text("sim.integrator", "rk4") != "rk4") throw ConfigError("field 'sim.integrator' must be rk4");
  sc.validate();

  const auto moments = sim::ensemble_moments(params, pot, sc, spec);
  ctx.write_json("moments.json", sim::to_json(moments));

  // Line-shape runs need a record much longer than 1/gamma, independent of the moment runs.
  // The bath repeats after 2 pi / d_omega, so the default segment keeps two mode spacings per bin.
  double d_omega = std::numeric_limits<double>::infinity();
  for (const auto& b : field::mode_bins(spec)) d_omega = std::min(d_omega, b.width);
  const double segment_time = cfg.number("psd.segment_time", std::numbers::pi / d_omega);
  const std::size_t n_psd = cfg.count("psd.trajectories", 64);
  sim::SimConfig psd_cfg = sc;
  psd_cfg.t_total = sc.t_burn + cfg.number("psd.duration", 1.5 * segment_time);
  sim::PsdOptions po;
  po.segment = static_cast<std::size_t>(segment_time / sc.dt);
  po.overlap = cfg.number("psd.overlap", 0.5);
  po.reference_omega = params.omega0;
  std::vector<std::vector<sim::PsdPoint>> spectra(n_psd);
  const bool write_traj = cfg.flag("sim.write_trajectory", true);
  sim::Trajectory first;
  parallel_for(n_psd, [&](std::size_t i) {
    const auto f = field::sample_zpf(spec, derive_seed(sc.seed, i));
    auto traj = sim::integrate(params, pot, f, psd_cfg);
    spectra[i] = sim::psd(traj, po);
    if (i == 0) first = std::move(traj);
  });
  if (write_traj && first.size() > 0) {
    std::vector<std::vector<double>> rows;
    rows.reserve(first.size());
    for (std::size_t i = 0; i < first.size(); ++i) rows.push_back({first.t[i], first.x[i], first.p[i]});
    ctx.write_csv("trajectory.csv", {"t", "x", "p"}, rows);
  }
  std::vector<std::vector<double>> psd_rows;
  if (n_psd > 0) {
    const auto avg = sim::average_psd(spectra);
    for (const auto& pt : avg) psd_rows.push_back({pt.omega, pt.power});
    ctx.write_csv("psd.csv", {"omega", "power"}, psd_rows);

    if (pot.kind() == sim::Potential::Kind::harmonic && params.gamma() > 0.0) {
      const auto line = sim::analyze_line(avg);
      ctx.add(make_check("psd_peak", std::nullopt, line.peak_omega, params.omega0, line.bin_width * (1.0 + 1e-9)));
      ctx.add(make_check("psd_fwhm", std::nullopt, line.fwhm, params.gamma(), 0.2 * params.gamma()));
    }
  }

  ctx.add(make_check("mean_x_zero", std::nullopt, moments.mean_x, 0.0, 3.0 * moments.stderr_x));
  ctx.add(make_check("stationarity_halves", std::nullopt, moments.second_half_x2, moments.first_half_x2,
                     3.0 * std::hypot(moments.first_half_stderr, moments.second_half_stderr)));
  if (pot.kind() == sim::Potential::Kind::harmonic && params.gamma() > 0.0) {
    const auto oracle = response::stationary_moments(params, spec);
    ctx.add(make_check("stationary_x2", std::nullopt, moments.mean_x2, oracle.x2, 3.0 * moments.stderr_x2));
    ctx.add(make_check("stationary_x2_relative", std::nullopt, moments.mean_x2 / oracle.x2, 1.0, 0.10));
    ctx.notes["oracle_x2"] = oracle.x2;
    ctx.notes["oracle_p2"] = oracle.p2;
  }
  ctx.notes["q_factor"] = params.tau > 0.0 ? nlohmann::json(response::q_factor(params)) : nlohmann::json("inf");
}

void run_response(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.has("response.omega_k")) cfg.require_section("oscillator", ctx.scenario);
  const auto params = oscillator(cfg);
  std::vector<response::LorentzianResponse> terms;
  if (cfg.has("response.omega_k")) {
    const auto w = cfg.list("response.omega_k");
    const auto g = cfg.list("response.gamma_k");
    if (w.size() != g.size()) throw ConfigError("fields 'response.omega_k' and 'response.gamma_k' differ in length");
    for (std::size_t i = 0; i < w.size(); ++i) terms.push_back({w[i], g[i]});
  } else {
    terms.push_back({params.omega0, params.gamma()});
  }
  const response::ResponseSet set(terms);
  if (set.broad()) ctx.notes["warning"] = "some gamma_k >= omega_k / 10: outside the narrow-line regime";

  const auto scan = response::kk_scan(set, cfg.number("response.omega_min", 0.2 * params.omega0),
                                      cfg.number("response.omega_max", 5.0 * params.omega0),
                                      cfg.count("response.n_points", 65536));
  std::vector<std::vector<double>> rows;
  rows.reserve(scan.points.size());
  for (const auto& pt : scan.points) rows.push_back({pt.omega, pt.re_chi, pt.im_chi, pt.re_chi_rec, pt.abs_err});
  ctx.write_csv("susceptibility.csv", {"omega", "re_chi", "im_chi", "re_chi_rec", "abs_err"}, rows);
  ctx.add(make_check("kk_residual", std::nullopt, scan.relative_residual, 0.0,
                     cfg.number("response.kk_tolerance", 0.02)));

  double w_fast = 0.0, g_min = terms.front().gamma_k;
  for (const auto& t : set.terms()) {
    w_fast = std::max(w_fast, t.omega_k);
    g_min = std::min(g_min, t.gamma_k);
  }
  const double dt = cfg.number("response.dt", 2.0 * std::numbers::pi / (32.0 * w_fast));
  const double t_min = cfg.number("response.t_min", -2.0 / g_min);
  const double t_max = cfg.number("response.t_max", 12.0 / g_min);
  const response::TimeGrid tg{std::round(t_min / dt) * dt, dt,
                             static_cast<std::size_t>(std::llround((t_max - t_min) / dt)) + 1};
  const auto ct = response::chi_time(set, tg);
  rows.clear();
  for (std::size_t i = 0; i < tg.n; ++i) rows.push_back({tg.at(i), ct.values[i]});
  ctx.write_csv("chi_time.csv", {"t", "chi"}, rows);
  ctx.add(make_check("causality", std::nullopt, response::causality_leak(ct, tg), 0.0,
                     cfg.number("response.causality_tolerance", 1e-3)));
  ctx.add(make_check("chi_time_reality", std::nullopt, ct.imag_residue, 0.0, 1e-6));
  if (params.tau > 0.0) ctx.notes["q_factor"] = response::q_factor(params);
}

void run_oracle(Context& ctx) {
  const auto& cfg = ctx.cfg;
  cfg.require_section("potential", ctx.scenario);
  cfg.require_section("grid", ctx.scenario);
  const auto pot = potential(cfg);
  const auto g = grid(cfg);
  const auto u = units(cfg);
  const auto method = spectral::discretization_from_string(cfg.text("grid.method", "sine-dvr"));
  const auto states = spectral::solve_states(pot, g, cfg.count("oracle.n_states", 10), u, method);
  const auto data = spectral::transition_data(states);
  ctx.write_json("transition_data.json", spectral::to_json(data));

  std::vector<std::vector<double>> rows;
  for (std::size_t n = 0; n < states.size(); ++n) rows.push_back({static_cast<double>(n), states.energy(n)});
  ctx.write_csv("energies.csv", {"n", "energy"}, rows);

  ctx.add(make_check("orthonormality", std::nullopt, spectral::orthonormality_error(states), 0.0, 1e-10));
  if (pot.kind() == sim::Potential::Kind::harmonic) {
    for (std::size_t n = 0; n < states.size(); ++n) {
      ctx.add(make_check("harmonic_energy", static_cast<long>(n), states.energy(n),
                         spectral::harmonic_energy(n, pot.omega0(), u), 1e-4));
    }
  }
}

void run_verify(Context& ctx) {
  const auto& cfg = ctx.cfg;
  cfg.require_section("potential", ctx.scenario);
  cfg.require_section("grid", ctx.scenario);
  const auto pot = potential(cfg);
  const auto g = grid(cfg);
  const auto u = units(cfg);
  const auto method = spectral::discretization_from_string(cfg.text("grid.method", "sine-dvr"));
  const std::size_t n_trunc = cfg.count("verify.n_trunc", 60);
  const std::size_t n_states = cfg.count("verify.n_states", n_trunc);
  if (n_trunc > n_states) throw ConfigError("field 'verify.n_trunc' exceeds 'verify.n_states'");
  const auto states = spectral::solve_states(pot, g, n_states, u, method);
  const auto data = spectral::transition_data(states);
  const auto mats = spectral::matrices(data, n_trunc);
  const auto force = spectral::force_matrix(states, pot, n_trunc);

  const std::size_t trk_states = cfg.count("verify.trk_states", 9);
  const double trk_tol = cfg.number("verify.trk_tolerance", 1e-6);
  const double conv_tol = cfg.number("verify.trk_convergence", 1e-6);
  const double bracket_tol = cfg.number("verify.bracket_tolerance", 1e-12);
  const auto times = cfg.list("verify.bracket_times", std::vector<double>{0.0, 0.7, 3.1, 12.9});
  nlohmann::json kmax = nlohmann::json::object();
  for (std::size_t n = 0; n < trk_states; ++n) {
    const auto trk = quantum::trk_converged(data, n, conv_tol);
    kmax[std::to_string(n)] = trk.k_max;
    ctx.add(make_check("trk_sum", static_cast<long>(n), trk.value, u.hbar, trk_tol));

    const auto pair = quantum::response_expansions(data, n, trk.k_max, derive_seed(ctx.seed, n));
    double spread = 0.0, equiv = 0.0;
    const auto b0 = quantum::poissonian_bracket(pair.x, pair.p, times.front());
    for (double t : times) {
      const auto b = quantum::poissonian_bracket(pair.x, pair.p, t);
      spread = std::max(spread, std::abs(b - b0));
      const auto canon = quantum::bracket_via_canonical_complex(pair.x, pair.p, t, quantum::zpf_mode_action(u.hbar));
      equiv = std::max(equiv, std::abs(canon - std::complex<double>(0.0, -1.0 / u.hbar) * b));
    }
    ctx.add(make_check("poissonian_bracket", static_cast<long>(n), std::abs(b0 - std::complex<double>(0.0, trk.value)),
                       0.0, bracket_tol));
    ctx.add(make_check("bracket_time_invariance", static_cast<long>(n), spread, 0.0, bracket_tol));
    ctx.add(make_check("bracket_coordinate_equivalence", static_cast<long>(n), equiv, 0.0, bracket_tol));
  }
  ctx.notes["trk_k_max"] = kmax;

  const auto comm = quantum::commutator(mats.X, mats.P, u.hbar);
  ctx.add(make_check("commutator_low_block", std::nullopt, comm.low_block_deviation, 0.0,
                     cfg.number("verify.commutator_tolerance", 1e-6)));
  ctx.notes["commutator_low_block_size"] = comm.low_block;
  ctx.notes["commutator_corner_deviation"] = comm.corner_deviation;
  ctx.notes["commutator_trace_abs"] = std::abs(comm.trace);

  const auto heis = quantum::heisenberg_check(mats.X, mats.P, mats.H, force, u.m, u.hbar);
  ctx.add(make_check("heisenberg_r1", std::nullopt, heis.r1_max, 0.0, cfg.number("verify.r1_tolerance", 1e-12)));
  ctx.add(make_check("heisenberg_r2", std::nullopt, heis.r2_max, 0.0, cfg.number("verify.r2_tolerance", 1e-6)));

  const auto low = spectral::truncate(data, std::min(cfg.count("verify.bohr_states", 9) + 1, data.size()));
  const auto bohr = quantum::bohr_check(low);
  ctx.add(make_check("bohr_construction", std::nullopt, bohr.construction_residual, 0.0,
                     1e-12 * std::max(1.0, low.energy(low.size() - 1))));
  if (pot.kind() == sim::Potential::Kind::harmonic) {
    ctx.add(make_check("bohr_spacing", std::nullopt, bohr.spacing_spread, 0.0, cfg.number("verify.bohr_tolerance", 1e-4)));
    ctx.add(make_check("bohr_spacing_value", std::nullopt, bohr.spacings.front(), pot.omega0(),
                       cfg.number("verify.bohr_tolerance", 1e-4)));
  } else {
    ctx.add(make_check("bohr_spacing_increasing", std::nullopt, bohr.spacings_increasing ? 0.0 : 1.0, 0.0, 0.5));
  }
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::field_sample: return "field-sample";
    case Scenario::simulate: return "simulate";
    case Scenario::response: return "response";
    case Scenario::oracle: return "oracle";
    case Scenario::verify: return "verify";
  }
  return "";
}

Scenario scenario_from_string(const std::string& name) {
  for (auto s : {Scenario::field_sample, Scenario::simulate, Scenario::response, Scenario::oracle, Scenario::verify}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

ConfigDocument ConfigDocument::parse(const std::string& text) {
  ConfigDocument doc;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || key.find_first_of(" \t") != std::string::npos) {
      throw ParseError("line " + std::to_string(lineno) + ": invalid key '" + key + "'");
    }
    if (doc.has(key)) throw ParseError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    doc.entries_[key] = value;
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

bool ConfigDocument::has_section(const std::string& section) const {
  const auto prefix = section + ".";
  const auto it = entries_.lower_bound(prefix);
  return it != entries_.end() && it->first.compare(0, prefix.size(), prefix) == 0;
}

const std::string* ConfigDocument::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string config_hash(const ConfigDocument& doc) {
  std::string canon;
  for (const auto& [k, v] : doc.entries()) canon += k + "=" + v + "\n";
  return hex64(fnv1a64(canon));
}

RunResult run(Scenario scenario, const ConfigDocument& input, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  ConfigDocument doc = input;
  for (const auto& [k, v] : doc.entries()) {
    if (!known_keys().count(k)) throw ConfigError("unknown field '" + k + "'");
  }
  if (const auto* s = doc.find("scenario"); s && *s != to_string(scenario)) {
    throw ConfigError("field 'scenario' is '" + *s + "' but the command runs '" + to_string(scenario) + "'");
  }
  if (options.seed) doc.set("seed", std::to_string(*options.seed));
  doc.set("scenario", to_string(scenario));

  Context ctx(scenario, doc, options);
  if (doc.has("seed")) {
    try {
      std::size_t pos = 0;
      const auto& s = *doc.find("seed");
      ctx.seed = std::stoull(s, &pos);
      if (pos != s.size() || s.front() == '-') throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError("field 'seed' must be an unsigned 64-bit integer");
    }
    ctx.has_seed = true;
  } else if (scenario == Scenario::field_sample) {
    throw ConfigError("scenario 'field-sample' requires field 'seed' (or --seed)");
  }

  std::error_code ec;
  fs::create_directories(options.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + options.out_dir.string() + "'");

  switch (scenario) {
    case Scenario::field_sample: run_field_sample(ctx); break;
    case Scenario::simulate: run_simulate(ctx); break;
    case Scenario::response: run_response(ctx); break;
    case Scenario::oracle: run_oracle(ctx); break;
    case Scenario::verify: run_verify(ctx); break;
  }

  RunResult result;
  const auto hash = config_hash(doc);
  std::size_t passed = 0;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : ctx.checks) {
    passed += c.pass ? 1 : 0;
    checks.push_back(to_json(c));
  }
  ctx.outputs.push_back("manifest.json");
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.manifest = {{"run_id", to_string(scenario) + "-" + hash.substr(0, 8)},
                     {"scenario", to_string(scenario)},
                     {"config_hash", hash},
                     {"version", ZPFLAB_VERSION},
                     {"wall_time_s", wall},
                     {"threads", thread_count()},
                     {"n_checks", ctx.checks.size()},
                     {"n_pass", passed},
                     {"n_fail", ctx.checks.size() - passed},
                     {"checks", checks},
                     {"outputs", ctx.outputs},
                     {"notes", ctx.notes}};
  ctx.outputs.pop_back();
  ctx.write_json("manifest.json", result.manifest);
  result.checks = std::move(ctx.checks);
  result.exit_code = passed == result.checks.size() ? 0 : 1;
  return result;
}

std::string ReportTable::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += "\n";
  }
  return out;
}

std::string ReportTable::to_text() const {
  std::vector<std::size_t> width(columns.size());
  for (std::size_t i = 0; i < columns.size(); ++i) width[i] = columns[i].size();
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      s += cells[i] + std::string(width[i] - cells[i].size() + 2, ' ');
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s + "\n";
  };
  std::string out = line(columns);
  std::size_t total = 0;
  for (auto w : width) total += w + 2;
  out += std::string(total > 2 ? total - 2 : 0, '-') + "\n";
  for (const auto& row : rows) out += line(row);
  return out;
}

ReportTable report(const std::vector<fs::path>& manifests) {
  if (manifests.empty()) throw ConfigError("report: no manifests given");
  struct Run {
    std::string id;
    std::vector<VerificationCheck> checks;
  };
  std::vector<Run> runs;
  std::map<std::string, int> id_uses;
  for (const auto& path : manifests) {
    std::ifstream is(path);
    if (!is) throw ConfigError("report: missing manifest '" + path.string() + "'");
    nlohmann::json doc;
    try {
      is >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("report: cannot parse '" + path.string() + "': " + e.what());
    }
    Run r;
    r.id = doc.value("run_id", path.stem().string());
    if (const int uses = id_uses[r.id]++; uses > 0) r.id += "#" + std::to_string(uses + 1);
    if (!doc.contains("checks")) throw ConfigError("report: '" + path.string() + "' has no checks");
    for (const auto& c : doc.at("checks")) r.checks.push_back(check_from_json(c));
    runs.push_back(std::move(r));
  }

  // A check repeated within one run (same name and state) gets an occurrence suffix.
  auto base_key = [](const VerificationCheck& c) {
    return c.check_name + "|" + (c.state_index ? std::to_string(*c.state_index) : std::string("-"));
  };
  std::vector<std::vector<std::string>> keys(runs.size()), names(runs.size());
  std::map<std::string, std::set<std::size_t>> owners;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    std::map<std::string, int> seen;
    for (const auto& c : runs[r].checks) {
      const auto base = base_key(c);
      const int k = ++seen[base];
      const auto suffix = k > 1 ? "[" + std::to_string(k) + "]" : std::string();
      keys[r].push_back(base + suffix);
      names[r].push_back(c.check_name + suffix);
      owners[keys[r].back()].insert(r);
    }
  }

  ReportTable table;
  table.columns = {"check_name", "state_index"};
  for (const auto& r : runs) {
    table.columns.push_back(r.id + ":value");
    table.columns.push_back(r.id + ":pass");
  }
  // Rows in first-seen order; shared keys split per run.
  std::set<std::string> emitted;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (std::size_t i = 0; i < runs[r].checks.size(); ++i) {
      const auto& c = runs[r].checks[i];
      const auto& key = keys[r][i];
      const bool shared = owners[key].size() > 1;
      const auto row_key = shared ? key + "@" + runs[r].id : key;
      if (!emitted.insert(row_key).second) continue;
      std::vector<std::string> row(table.columns.size(), "-");
      row[0] = shared ? names[r][i] + "@" + runs[r].id : names[r][i];
      row[1] = c.state_index ? std::to_string(*c.state_index) : "-";
      row[2 + 2 * r] = format_number(c.value);
      row[3 + 2 * r] = c.pass ? "pass" : "FAIL";
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

int exit_status_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return 2;
  if (dynamic_cast<const DivergenceError*>(&e)) return 4;
  if (dynamic_cast<const Error*>(&e)) return 3;
  return 1;
}

}  // namespace zpflab::scenario
