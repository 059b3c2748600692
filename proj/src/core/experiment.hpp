#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/diagnostics.hpp"
#include "core/gridfn.hpp"

namespace peakon {

enum class Scenario { Identities, Linear, Nonlinear, Instability, Blowup, OracleCompare };

const char* to_string(Scenario s) noexcept;
Scenario scenario_from_string(const std::string& name);

/// Flat run description. Every key of the config file maps to one field;
/// see kConfigKeys for the file spelling and serialization order.
struct ExperimentConfig {
  Scenario scenario = Scenario::Identities;

  double L = 25.0;
  int N = 2000;
  double ratio = 1.003;

  double dt = 1e-2;
  double t_end = 2.0;
  double record_interval = 0.1;

  std::optional<double> eps;  // required by blowup
  InitialDatumSpec datum;
  double h1_norm = 0.0;  // > 0: rescale the datum to this H^1 norm

  double slope_blowup = 1e6;
  double jacobian = 1e-30;

  std::string output_dir = "out";
  std::uint64_t seed = 1;

  double c0 = 0.01;       // P+Q audit constant, calibrated on the reference nonlinear run
  double c_growth = 1.0;  // constant in the instability time estimate

  int identity_cases = 5;
  double identity_tol = 1e-6;

  int oracle_nodes = 2001;
  int oracle_levels = 4;
  double oracle_cfl = 0.4;
  double oracle_tol = 1e-2;
  double nu = 0.0;
};

extern const std::vector<std::string> kConfigKeys;

/// `key = value` lines, `#` starts a comment. Unknown or repeated keys are
/// Parse errors carrying the line number; bad values are Validation errors
/// naming the field.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Sets one key from its text form; same errors as parse_config without a line number.
void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value);

/// Throws Validation naming the first offending field.
void validate(const ExperimentConfig& c);

/// Every key in kConfigKeys order, floats with 17 significant digits.
std::string serialize(const ExperimentConfig& c);
inline std::string normalize(const std::string& text) { return serialize(parse_config(text)); }

struct AuditResult {
  std::string name;
  AuditStatus status = AuditStatus::Pass;
  std::string detail;
};

struct RunResult {
  std::vector<AuditResult> audits;
  Report report;
  /// Scenario-specific values written to the report after the standard keys.
  std::vector<std::pair<std::string, std::string>> extra;
  std::vector<std::string> files;  // written, relative to output_dir

  bool passed() const;
  /// Name and detail of the first failed audit, empty if none failed.
  std::string first_failure() const;
};

/// Runs the scenario and writes its artifacts (manifest, CSVs, snapshots,
/// report) into output_dir, creating it if needed.
RunResult run_experiment(const ExperimentConfig& c);

}  // namespace peakon
