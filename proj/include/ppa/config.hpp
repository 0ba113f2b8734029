#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppa/engine.hpp"
#include "ppa/spaces.hpp"
#include "ppa/trajectory_io.hpp"

namespace ppa {

using json = nlohmann::ordered_json;

struct MonitorSet {
  bool f_monotone = true;
  bool fejer = false;
  bool tilde = false;
  bool strong_qc = false;
  bool rate = false;
};

struct OutputSpec {
  std::string trajectory_csv = "trajectory.csv";
  std::string summary_json = "summary.json";
};

/// A fully validated experiment: spaces and objectives are already built,
/// points resolved against the space, schedule admissibility checked.
struct ExperimentConfig {
  int version = 1;
  SpaceSpec space_spec;
  std::shared_ptr<const GeodesicSpace> space;
  Objective objective;
  Point x0;
  Schedule schedule;
  StopCriteria stop;
  double monitor_tolerance = 1e-8;
  std::optional<double> resolvent_gap;  // absolute; space default when absent
  double resolvent_relative_gap = 1e-10;
  unsigned long long seed = 1;
  MonitorSet monitors;
  OutputSpec output;
  json echo;  // the document as parsed
};

/// Either a config or the full list of validation errors (never both).
struct ParseOutcome {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;
  bool ok() const { return config.has_value(); }
};

/// Parse and validate the canonical JSON config (schema version 1). Unknown
/// keys anywhere in the document are errors; all violations are collected.
ParseOutcome parse_config(const std::string& text);
ParseOutcome parse_config_json(const json& doc);

struct MonitorWorst {
  double worst_f_margin = 0.0;
  bool f_ok = true;
  double worst_fejer_margin = 0.0;
  bool fejer_ok = true;
  double worst_tilde_residual = 0.0;
  double tilde_threshold = 0.0;
  bool tilde_ok = true;
  double worst_sqc_residual = 0.0;
  bool sqc_ok = true;
  double weighted_sum = 0.0;
  double sum_bound = 0.0;
  bool sum_ok = true;
  double rate_final_over_max = 0.0;
  bool rate_ok = true;
};

struct RunReport {
  json config_echo;
  std::string objective_description;
  StopReason stop_reason = StopReason::max_iterations;
  long iterations = 0;
  double final_f = 0.0;
  double final_step = 0.0;
  double final_slope = 0.0;
  bool conclusive = false;
  std::optional<std::string> value_class;  // value-converged / value-gap
  std::optional<long> iterations_to_eps;   // first n with d(x_n, x~) <= 1e-6
  double rate_final = 0.0;                 // last entry of the rate series
  MonitorWorst monitors;
  bool any_violation = false;
  std::optional<double> oracle_max_deviation;
  double elapsed_seconds = 0.0;
  std::string csv_path;
  std::string summary_path;
  json summary;
  std::vector<std::string> warnings;
};

struct RunOverrides {
  std::optional<std::string> out_dir;
  std::optional<unsigned long long> seed;
  bool strict = false;                 // abort on violations > 100x tolerance
  std::optional<double> oracle_step;   // per-step oracle cross-check
  bool write_files = true;
};

/// Execute the configured PPA run, compute the enabled monitors, and emit
/// the trajectory CSV and summary JSON. Deterministic given config + seed.
RunReport run_experiment(const ExperimentConfig& cfg, const RunOverrides& overrides = {});

struct ComparisonTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string to_text() const;
};

/// Side-by-side table over runs of the same objective (ArgumentError on a
/// mismatch): iterations, iterations-to-eps, rate finals, worst monitors.
ComparisonTable compare_runs(const std::vector<RunReport>& reports);

struct ReplayOutcome {
  ReplayedMonitors monitors;
  bool matches_summary = false;
  bool violations = false;
  std::vector<std::string> issues;
};

/// Recompute monitor aggregates from an emitted trajectory CSV and check
/// them against the run's summary at full print precision; `violations`
/// reports tolerance breaches found in the replayed data.
ReplayOutcome replay_run(const std::string& csv_text, const json& summary);

}  // namespace ppa
