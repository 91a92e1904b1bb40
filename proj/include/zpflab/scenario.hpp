#pragma once

// Configuration-driven runs. A run config is a plain-text document of
// `section.key = value` lines ('#' starts a comment). Each scenario composes
// library operations, writes CSV/JSON artifacts and a manifest.json.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "zpflab/check.hpp"
#include "zpflab/error.hpp"

namespace zpflab::scenario {

// Malformed config text (exit status 2).
class ParseError : public Error {
 public:
  using Error::Error;
};

enum class Scenario { field_sample, simulate, response, oracle, verify };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

class ConfigDocument {
 public:
  // Throws ParseError on lines without '=', empty keys or duplicate keys.
  static ConfigDocument parse(const std::string& text);
  static ConfigDocument load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  bool has_section(const std::string& section) const;
  const std::string* find(const std::string& key) const;
  void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

struct RunResult {
  // 0 if every check passed, 1 otherwise.
  int exit_code = 0;
  nlohmann::json manifest;
  std::vector<VerificationCheck> checks;
};

// Canonical hash of the effective configuration (seed override included,
// output location excluded).
std::string config_hash(const ConfigDocument& doc);

// Throws ParseError, ConfigError (validation, exit 3), DivergenceError (exit 4).
RunResult run(Scenario scenario, const ConfigDocument& doc, const RunOptions& options);

struct ReportTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
  std::string to_text() const;
};

// One row per check; columns check_name, state_index, then <run_id>:value and
// <run_id>:pass per manifest in the given order. Absent entries are "-". A
// check key present in more than one run gets one row per run, suffixed
// "@<run_id>". Throws ConfigError if a manifest is missing or unreadable.
ReportTable report(const std::vector<std::filesystem::path>& manifests);

// Maps exceptions from run/report onto the documented exit statuses.
int exit_status_for(const std::exception& e);

}  // namespace zpflab::scenario
