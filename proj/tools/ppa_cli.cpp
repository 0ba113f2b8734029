#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "ppa/config.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitError = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ppa::ConfigError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ppa::ExperimentConfig load_config(const std::string& path) {
  auto outcome = ppa::parse_config(slurp(path));
  if (!outcome.ok()) {
    std::cerr << path << ": invalid config\n";
    for (const auto& e : outcome.errors) std::cerr << "  - " << e << "\n";
    throw ppa::ConfigError("config validation failed");
  }
  return std::move(*outcome.config);
}

void print_report(const ppa::RunReport& report) {
  std::cout << "objective:   " << report.objective_description << "\n"
            << "stop:        " << ppa::to_string(report.stop_reason) << " after "
            << report.iterations << " iterations\n"
            << "final f:     " << ppa::format_full(report.final_f) << "\n"
            << "final step:  " << ppa::format_full(report.final_step) << "\n"
            << "final slope: " << ppa::format_full(report.final_slope)
            << (report.conclusive ? " (conclusive)" : " (inconclusive)") << "\n";
  if (report.value_class) std::cout << "value class: " << *report.value_class << "\n";
  const auto& m = report.monitors;
  std::cout << "monitors:    f_margin>=" << ppa::format_full(m.worst_f_margin);
  if (report.value_class) {
    std::cout << "  fejer>=" << ppa::format_full(m.worst_fejer_margin)
              << "  tilde<=" << ppa::format_full(m.worst_tilde_residual);
  }
  std::cout << "\n";
  if (report.oracle_max_deviation) {
    std::cout << "oracle:      max deviation " << ppa::format_full(*report.oracle_max_deviation)
              << "\n";
  }
  for (const auto& w : report.warnings) std::cout << "warning:     " << w << "\n";
  if (!report.csv_path.empty()) {
    std::cout << "wrote:       " << report.csv_path << ", " << report.summary_path << "\n";
  }
  std::cout << (report.any_violation ? "MONITOR VIOLATION\n" : "all monitors ok\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proximal point algorithm on Hadamard model spaces"};
  app.require_subcommand(1);

  std::string config_path, out_dir, csv_path, summary_path;
  std::vector<std::string> config_paths;
  unsigned long long seed = 0;
  bool seed_set = false, strict = false, oracle = false;
  double oracle_step = 1e-4;
  long samples = 1000, seeds = 10, count = 20;
  double grid_step = 1e-4;

  auto* validate = app.add_subcommand("validate", "Check a config file");
  validate->add_option("--config", config_path, "Experiment config (JSON)")->required();

  auto* run_cmd = app.add_subcommand("run", "Run a configured experiment");
  run_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--seed", seed, "Override the config seed")->each([&](const std::string&) {
    seed_set = true;
  });
  run_cmd->add_flag("--strict", strict, "Abort on monitor violations beyond 100x tolerance");
  run_cmd->add_flag("--oracle", oracle, "Cross-check every step against the grid oracle");
  run_cmd->add_option("--oracle-step", oracle_step, "Oracle grid step (with --oracle)");

  auto* compare = app.add_subcommand("compare", "Run several configs and tabulate them");
  compare->add_option("--config", config_paths, "Config files (repeat; >= 2)")
      ->required()
      ->expected(-2);
  compare->add_option("--out", out_dir, "Output directory");

  auto* conformance = app.add_subcommand("conformance", "CAT(0) conformance of a config's space");
  conformance->add_option("--config", config_path, "Experiment config (JSON)")->required();
  conformance->add_option("--samples", samples, "Samples per seed (default 1000)");
  conformance->add_option("--seeds", seeds, "Number of seeds (default 10)");

  auto* oracle_check = app.add_subcommand("oracle-check", "Resolvent vs brute-force oracle");
  oracle_check->add_option("--config", config_path, "Experiment config (JSON)")->required();
  oracle_check->add_option("--count", count, "Random (lambda, x) draws (default 20)");
  oracle_check->add_option("--step", grid_step, "Oracle grid step (default 1e-4)");

  auto* replay = app.add_subcommand("replay", "Recompute monitors from an emitted trajectory");
  replay->add_option("--csv", csv_path, "Trajectory CSV")->required();
  replay->add_option("--summary", summary_path, "Run summary JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      load_config(config_path);
      std::cout << config_path << ": OK\n";
      return kExitOk;
    }

    if (run_cmd->parsed()) {
      const auto cfg = load_config(config_path);
      ppa::RunOverrides ov;
      if (!out_dir.empty()) ov.out_dir = out_dir;
      if (seed_set) ov.seed = seed;
      ov.strict = strict;
      if (oracle) ov.oracle_step = oracle_step;
      const auto report = ppa::run_experiment(cfg, ov);
      print_report(report);
      return report.any_violation ? kExitViolation : kExitOk;
    }

    if (compare->parsed()) {
      std::vector<ppa::RunReport> reports;
      for (std::size_t i = 0; i < config_paths.size(); ++i) {
        const auto cfg = load_config(config_paths[i]);
        ppa::RunOverrides ov;
        if (!out_dir.empty()) ov.out_dir = out_dir + "/run" + std::to_string(i);
        reports.push_back(ppa::run_experiment(cfg, ov));
      }
      std::cout << ppa::compare_runs(reports).to_text();
      bool violation = false;
      for (const auto& r : reports) violation = violation || r.any_violation;
      return violation ? kExitViolation : kExitOk;
    }

    if (conformance->parsed()) {
      const auto cfg = load_config(config_path);
      bool ok = true;
      for (long s = 1; s <= seeds; ++s) {
        const auto report = ppa::conformance_report(*cfg.space, samples, s);
        std::cout << cfg.space->description() << " seed " << s << ": max violation "
                  << ppa::format_full(report.max_violation()) << " (tolerance "
                  << ppa::format_full(report.tolerance) << ")"
                  << (report.passed() ? "" : "  FAIL") << "\n";
        ok = ok && report.passed();
      }
      return ok ? kExitOk : kExitViolation;
    }

    if (oracle_check->parsed()) {
      const auto cfg = load_config(config_path);
      std::mt19937_64 rng(cfg.seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double alpha = cfg.objective.weak_convexity_alpha.value_or(0.0);
      double worst = 0.0;
      bool ok = true;
      for (long i = 0; i < count; ++i) {
        const double lambda =
            alpha > 0.0 ? (0.1 + 0.7 * unit(rng)) * 0.5 / alpha : 0.1 + 0.9 * unit(rng);
        const ppa::Point x = cfg.space->sample(rng);
        ppa::ResolveOptions ropts;
        ropts.certified_gap = cfg.resolvent_gap;
        ropts.relative_gap = cfg.resolvent_relative_gap;
        const auto res = ppa::resolve(*cfg.space, cfg.objective, lambda, x, ropts, rng);
        const auto orc =
            ppa::oracle_resolve(*cfg.space, cfg.objective, lambda, x, ppa::GridSpec{grid_step});
        const double mu = 0.5 / lambda - alpha;
        const double dev = cfg.space->distance(res.point, orc.point);
        const double allowed = grid_step + std::sqrt(res.certified_gap / mu) + 1e-9;
        worst = std::max(worst, dev);
        if (dev > allowed) {
          ok = false;
          std::cout << "draw " << i << ": deviation " << ppa::format_full(dev) << " > allowed "
                    << ppa::format_full(allowed) << "  FAIL\n";
        }
      }
      std::cout << count << " draws, worst deviation " << ppa::format_full(worst) << "\n";
      return ok ? kExitOk : kExitViolation;
    }

    if (replay->parsed()) {
      const std::string csv_text = slurp(csv_path);
      const auto summary = ppa::json::parse(slurp(summary_path));
      const auto outcome = ppa::replay_run(csv_text, summary);
      for (const auto& issue : outcome.issues) std::cout << issue << "\n";
      std::cout << (outcome.matches_summary ? "replay matches summary"
                                            : "replay DIFFERS from summary")
                << (outcome.violations ? "; violations found" : "") << "\n";
      return (outcome.violations || !outcome.matches_summary) ? kExitViolation : kExitOk;
    }
  } catch (const ppa::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
