#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "upsilon/space_form.hpp"
#include "upsilon/verify.hpp"

namespace upsilon {

struct CheckSpec {
  std::string name;
  /// The check's parameter table, converted to JSON.
  nlohmann::json params = nlohmann::json::object();
};

/// A verification run. Loaded from TOML:
///
///   seed = 42                  # required
///   output = "reports.jsonl"   # optional; stdout when empty
///   jobs = 2                   # optional
///   [space]                    # kind = "euclidean" | "sphere2" | "hyperbolic2"
///   kind = "euclidean"
///   dim = 2
///   [samples]                  # Monte Carlo sizes: default and per-check overrides
///   default = 10000
///   [tolerances]               # per-check tolerance overrides
///   quadruple = 1e-9
///   [[checks]]
///   name = "quadruple"
///   instances = 100
struct RunConfig {
  SpaceForm space = SpaceForm::euclidean(2);
  std::uint64_t seed = 0;
  std::size_t default_samples = 10000;
  std::map<std::string, std::size_t> samples;
  std::map<std::string, double> tolerances;
  std::string output;
  int jobs = 1;
  std::vector<CheckSpec> checks;
  /// The whole document as JSON.
  nlohmann::json echo;
};

/// Names accepted in [[checks]] entries.
const std::vector<std::string>& check_names();

/// Parse a TOML document; throws ParseError on malformed input or unknown check names.
RunConfig parse_run_config(std::string_view toml_text, std::string_view source = "config");
RunConfig load_run_config(const std::string& path);

/// Run every instance of every check, `jobs` checks at a time. Reports come back in
/// configuration order whatever the job count.
std::vector<CheckReport> execute_checks(const RunConfig& config, int jobs);

/// Execute and write one JSON line per report. Returns 0 when every report passed,
/// 1 when some check failed and 2 when a check could not be set up from the config
/// (the diagnostic goes to `diagnostics`).
int run(const RunConfig& config, std::ostream& reports, std::ostream& diagnostics, int jobs);

/// The report line with runtime_ms removed, for reproducibility comparisons.
std::string strip_runtime(const std::string& report_line);

}  // namespace upsilon
