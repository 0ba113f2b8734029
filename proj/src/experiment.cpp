#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "ppa/config.hpp"

namespace ppa {

namespace {

json json_or_null(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg, const RunOverrides& overrides) {
  const auto t0 = std::chrono::steady_clock::now();

  RunOptions opts;
  opts.resolve.certified_gap = cfg.resolvent_gap;
  opts.resolve.relative_gap = cfg.resolvent_relative_gap;
  opts.monitor_tolerance = cfg.monitor_tolerance;
  opts.abort_on_violation = overrides.strict;
  opts.oracle_step = overrides.oracle_step;
  opts.seed = overrides.seed.value_or(cfg.seed);

  RunReport report;
  report.config_echo = cfg.echo;
  report.objective_description = cfg.objective.description;
  if (!cfg.objective.weak_convexity_alpha) {
    report.warnings.push_back(
        "objective declares no weak-convexity alpha; resolvent uniqueness is not guaranteed");
  }

  const Trajectory traj = run(*cfg.space, cfg.objective, cfg.x0, cfg.schedule, cfg.stop, opts);
  report.stop_reason = traj.stop_reason;
  report.iterations = traj.iterations();
  report.final_f = traj.records.back().f_value;
  report.final_step = traj.records.back().step_distance;
  report.oracle_max_deviation = traj.oracle_max_deviation;

  {
    std::mt19937_64 slope_rng(opts.seed ^ 0x510be5ULL);
    const auto cp = critical_point_residual(*cfg.space, cfg.objective, traj, ProbeOptions{},
                                            slope_rng);
    report.final_slope = cp.slope.value;
    report.conclusive = cp.conclusive;
  }

  const double tol = cfg.monitor_tolerance;
  auto& mw = report.monitors;
  mw.worst_f_margin = std::numeric_limits<double>::infinity();
  for (long n = 1; n <= traj.iterations(); ++n) {
    mw.worst_f_margin = std::min(mw.worst_f_margin, traj.monitors.f_margin[n]);
  }
  if (traj.iterations() == 0) mw.worst_f_margin = 0.0;
  mw.f_ok = mw.worst_f_margin >= -tol;

  const bool with_ref = traj.has_reference;
  const double d0 = with_ref ? traj.monitors.dist_to_ref[0] : 0.0;
  mw.tilde_threshold = tol * (1.0 + d0 * d0);
  if (with_ref && traj.iterations() > 0) {
    mw.worst_fejer_margin = std::numeric_limits<double>::infinity();
    mw.worst_tilde_residual = -std::numeric_limits<double>::infinity();
    if (cfg.objective.strong_qc_alpha) {
      mw.worst_sqc_residual = -std::numeric_limits<double>::infinity();
    }
    double rate_max = 0.0;
    double rate_final = 0.0;
    for (long n = 1; n <= traj.iterations(); ++n) {
      mw.worst_fejer_margin = std::min(mw.worst_fejer_margin, traj.monitors.fejer_margin[n]);
      mw.worst_tilde_residual = std::max(mw.worst_tilde_residual, traj.monitors.tilde_residual[n]);
      const double d = traj.monitors.dist_to_ref[n];
      mw.weighted_sum += traj.records[n].lambda * d * d;
      rate_max = std::max(rate_max, traj.monitors.rate_value[n]);
      rate_final = traj.monitors.rate_value[n];
      if (cfg.objective.strong_qc_alpha) {
        mw.worst_sqc_residual = std::max(mw.worst_sqc_residual, traj.monitors.sqc_residual[n]);
      }
    }
    mw.rate_final_over_max = rate_max > 0.0 ? rate_final / rate_max : 0.0;
    report.rate_final = rate_final;
    if (const auto& alpha = cfg.objective.strong_qc_alpha) {
      mw.sum_bound = d0 * d0 / *alpha;
      mw.sum_ok = *alpha * mw.weighted_sum <= d0 * d0 + tol;
      mw.sqc_ok = mw.worst_sqc_residual <= tol;
    }
    mw.fejer_ok = mw.worst_fejer_margin >= -tol;
    mw.tilde_ok = mw.worst_tilde_residual <= mw.tilde_threshold;
    mw.rate_ok = mw.rate_final_over_max < 0.1;

    for (long n = 1; n <= traj.iterations(); ++n) {
      if (traj.monitors.dist_to_ref[n] <= 1e-6) {
        report.iterations_to_eps = n;
        break;
      }
    }
    const double f_min = cfg.objective(*cfg.objective.known_minimizer);
    report.value_class = std::abs(report.final_f - f_min) <= 1e-6 * (1.0 + std::abs(f_min))
                             ? "value-converged"
                             : "value-gap";
  }

  report.any_violation = false;
  if (cfg.monitors.f_monotone && !mw.f_ok) report.any_violation = true;
  if (cfg.monitors.fejer && !mw.fejer_ok) report.any_violation = true;
  if (cfg.monitors.tilde && !mw.tilde_ok) report.any_violation = true;
  if (cfg.monitors.strong_qc && (!mw.sqc_ok || !mw.sum_ok)) report.any_violation = true;
  if (cfg.monitors.rate && !mw.rate_ok) report.any_violation = true;
  if (traj.stop_reason == StopReason::monitor_abort) report.any_violation = true;

  const auto t1 = std::chrono::steady_clock::now();
  report.elapsed_seconds = std::chrono::duration<double>(t1 - t0).count();

  // Summary document. Carries everything the replay needs: the strong-qc
  // alpha, thresholds, and the enabled monitors' worst cases.
  json monitors_json = json::object();
  if (cfg.monitors.f_monotone) {
    monitors_json["f_monotone"] = {{"worst_margin", mw.worst_f_margin}, {"passed", mw.f_ok}};
  }
  if (cfg.monitors.fejer) {
    monitors_json["fejer"] = {{"worst_margin", mw.worst_fejer_margin}, {"passed", mw.fejer_ok}};
  }
  if (cfg.monitors.tilde) {
    monitors_json["tilde"] = {{"worst_residual", mw.worst_tilde_residual},
                              {"threshold", mw.tilde_threshold},
                              {"passed", mw.tilde_ok}};
  }
  if (cfg.monitors.strong_qc) {
    monitors_json["strong_qc"] = {{"worst_residual", mw.worst_sqc_residual},
                                  {"weighted_sum", mw.weighted_sum},
                                  {"sum_bound", mw.sum_bound},
                                  {"passed", mw.sqc_ok && mw.sum_ok}};
  }
  if (cfg.monitors.rate) {
    monitors_json["rate"] = {{"final_over_max", mw.rate_final_over_max}, {"passed", mw.rate_ok}};
  }

  report.summary = json{
      {"version", 1},
      {"config", cfg.echo},
      {"objective", cfg.objective.description},
      {"strong_qc_alpha", json_or_null(cfg.objective.strong_qc_alpha)},
      {"monitor_tolerance", cfg.monitor_tolerance},
      {"seed", opts.seed},
      {"stop_reason", to_string(traj.stop_reason)},
      {"iterations", report.iterations},
      {"final_f", report.final_f},
      {"final_step", report.final_step},
      {"final_slope", report.final_slope},
      {"conclusive", report.conclusive},
      {"value_class", report.value_class ? json(*report.value_class) : json(nullptr)},
      {"iterations_to_eps",
       report.iterations_to_eps ? json(*report.iterations_to_eps) : json(nullptr)},
      {"monitors", monitors_json},
      {"any_violation", report.any_violation},
      {"oracle_max_deviation", json_or_null(report.oracle_max_deviation)},
      {"warnings", report.warnings},
      {"elapsed_seconds", report.elapsed_seconds},
  };

  if (overrides.write_files) {
    namespace fs = std::filesystem;
    fs::path csv_path = cfg.output.trajectory_csv;
    fs::path summary_path = cfg.output.summary_json;
    if (overrides.out_dir) {
      fs::create_directories(*overrides.out_dir);
      csv_path = fs::path(*overrides.out_dir) / csv_path;
      summary_path = fs::path(*overrides.out_dir) / summary_path;
    }
    std::ofstream csv(csv_path);
    if (!csv) throw ConfigError("run_experiment: cannot open " + csv_path.string());
    write_trajectory_csv(csv, traj);
    std::ofstream sj(summary_path);
    if (!sj) throw ConfigError("run_experiment: cannot open " + summary_path.string());
    sj << report.summary.dump(2) << "\n";
    report.csv_path = csv_path.string();
    report.summary_path = summary_path.string();
  }
  return report;
}

std::string ComparisonTable::to_text() const {
  std::vector<std::size_t> widths(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) widths[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << row[c] << std::string(widths[c] - row[c].size() + 2, ' ');
    }
    os << "\n";
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return os.str();
}

ComparisonTable compare_runs(const std::vector<RunReport>& reports) {
  if (reports.size() < 2) {
    throw ArgumentError("compare_runs: need at least two run reports");
  }
  for (const auto& r : reports) {
    if (r.objective_description != reports.front().objective_description) {
      throw ArgumentError("compare_runs: objective mismatch ('" + r.objective_description +
                          "' vs '" + reports.front().objective_description + "')");
    }
  }
  ComparisonTable table;
  table.header = {"run",        "schedule",     "iterations", "stop",
                  "iters_to_eps", "rate_final", "worst_fejer", "worst_tilde",
                  "final_f",    "violations"};
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    std::string schedule = r.config_echo.contains("schedule") ? r.config_echo["schedule"].dump()
                                                              : "?";
    table.rows.push_back({
        std::to_string(i),
        schedule,
        std::to_string(r.iterations),
        to_string(r.stop_reason),
        r.iterations_to_eps ? std::to_string(*r.iterations_to_eps) : "-",
        format_full(r.rate_final),
        format_full(r.monitors.worst_fejer_margin),
        format_full(r.monitors.worst_tilde_residual),
        format_full(r.final_f),
        r.any_violation ? "YES" : "none",
    });
  }
  return table;
}

ReplayOutcome replay_run(const std::string& csv_text, const json& summary) {
  ReplayOutcome out;
  std::istringstream in(csv_text);
  const TrajectoryTable table = read_trajectory_csv(in);

  std::optional<double> alpha;
  if (summary.contains("strong_qc_alpha") && summary["strong_qc_alpha"].is_number()) {
    alpha = summary["strong_qc_alpha"].get<double>();
  }
  out.monitors = replay_monitors(table, alpha);
  out.matches_summary = out.monitors.derived_columns_match;
  if (!out.monitors.derived_columns_match) {
    out.issues.push_back("derived columns do not match their recomputation");
  }

  const double tol = summary.contains("monitor_tolerance")
                         ? summary["monitor_tolerance"].get<double>()
                         : 1e-8;
  const json monitors = summary.contains("monitors") ? summary["monitors"] : json::object();

  auto check_value = [&](const char* monitor, const char* field, double replayed) {
    if (!monitors.contains(monitor)) return;
    const double recorded = monitors[monitor][field].get<double>();
    if (format_full(recorded) != format_full(replayed)) {
      out.matches_summary = false;
      out.issues.push_back(std::string(monitor) + "." + field + ": summary " +
                           format_full(recorded) + " != replay " + format_full(replayed));
    }
  };
  check_value("f_monotone", "worst_margin", out.monitors.worst_f_margin);
  check_value("fejer", "worst_margin", out.monitors.worst_fejer_margin);
  check_value("tilde", "worst_residual", out.monitors.worst_tilde_residual);
  check_value("strong_qc", "worst_residual", out.monitors.worst_sqc_residual);
  check_value("strong_qc", "weighted_sum", out.monitors.weighted_sum);
  check_value("rate", "final_over_max", out.monitors.rate_final_over_max);

  if (monitors.contains("f_monotone") && out.monitors.worst_f_margin < -tol) {
    out.violations = true;
    out.issues.push_back("f_monotone violated: worst margin " +
                         format_full(out.monitors.worst_f_margin));
  }
  if (monitors.contains("fejer") && out.monitors.worst_fejer_margin < -tol) {
    out.violations = true;
    out.issues.push_back("fejer violated: worst margin " +
                         format_full(out.monitors.worst_fejer_margin));
  }
  if (monitors.contains("tilde")) {
    const double threshold = monitors["tilde"]["threshold"].get<double>();
    if (out.monitors.worst_tilde_residual > threshold) {
      out.violations = true;
      out.issues.push_back("tilde violated: worst residual " +
                           format_full(out.monitors.worst_tilde_residual));
    }
  }
  if (monitors.contains("strong_qc") && alpha) {
    const double d0 = table.dist_to_ref.empty() ? 0.0 : table.dist_to_ref[0];
    if (out.monitors.worst_sqc_residual > tol ||
        *alpha * out.monitors.weighted_sum > d0 * d0 + tol) {
      out.violations = true;
      out.issues.push_back("strong_qc violated");
    }
  }
  if (monitors.contains("rate") && out.monitors.rate_final_over_max >= 0.1) {
    out.violations = true;
    out.issues.push_back("rate trend violated: final/max " +
                         format_full(out.monitors.rate_final_over_max));
  }
  return out;
}

}  // namespace ppa
