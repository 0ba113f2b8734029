// Acceptance battery: one line per criterion, nonzero exit on any failure.
// argv[1] must point at the ppa CLI binary (used by the determinism check).

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "ppa/config.hpp"
#include "ppa/engine.hpp"
#include "ppa/resolvent.hpp"
#include "ppa/spaces.hpp"
#include "ppa/trajectory_io.hpp"

using namespace ppa;

namespace {

int failures = 0;

void report(int num, const std::string& what, bool ok, const std::string& detail = "") {
  std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", num, what.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) { return format_full(v); }

// ---------------------------------------------------------------------------

void criterion1_space_conformance() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<SpaceSpec> specs = {
      SpaceSpec::euclidean(1),
      SpaceSpec::euclidean(2),
      SpaceSpec::euclidean(3),
      SpaceSpec::poincare_ball(2),
      SpaceSpec::spider(3),
      SpaceSpec::spider(5),
      SpaceSpec::product({SpaceSpec::euclidean(2), SpaceSpec::spider(3)}),
  };
  bool ok = true;
  std::string detail;
  for (const auto& spec : specs) {
    const auto space = make_space(spec);
    for (unsigned long long seed = 1; seed <= 10; ++seed) {
      const auto rep = conformance_report(*space, 1000, seed);
      if (!rep.passed()) {
        ok = false;
        detail = space->description() + " seed " + std::to_string(seed) + " violation " +
                 fmt(rep.max_violation()) + " > " + fmt(rep.tolerance);
      }
    }
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 10.0) {
    ok = false;
    detail += " runtime " + fmt(elapsed) + "s >= 10s";
  }
  report(1, "space conformance, 7 spaces x 10 seeds x 1000 samples", ok,
         ok ? fmt(elapsed) + "s" : detail);
}

struct Draw {
  std::shared_ptr<const GeodesicSpace> space;
  Objective objective;
  double lambda;
  Point x;
};

std::vector<Draw> random_instances(int per_space, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<SpaceSpec> specs = {SpaceSpec::euclidean(1), SpaceSpec::euclidean(2),
                                        SpaceSpec::spider(3), SpaceSpec::poincare_ball(2)};
  std::vector<Draw> draws;
  for (const auto& spec : specs) {
    auto space = make_space(spec);
    for (int i = 0; i < per_space; ++i) {
      const Point target = space->sample(rng);
      const double c = 0.3 + 1.2 * unit(rng);
      ObjectiveSpec ospec = i % 3 == 0   ? ObjectiveSpec::squared_distance(target, c)
                            : i % 3 == 1 ? ObjectiveSpec::distance(target, c)
                                         : ObjectiveSpec::gaussian_well(target, c);
      Objective f = make_objective(space, ospec);
      const double alpha = f.weak_convexity_alpha.value_or(0.0);
      const double lambda =
          alpha > 0.0 ? (0.1 + 0.5 * unit(rng)) / (2.0 * alpha) : 0.1 + 0.5 * unit(rng);
      draws.push_back(Draw{space, std::move(f), lambda, space->sample(rng)});
    }
  }
  return draws;
}

void criterion2_oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto draws = random_instances(13, 0xacce51ULL);  // 52 instances
  std::mt19937_64 rng(1);
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const auto& d = draws[i];
    const auto res = resolve(*d.space, d.objective, d.lambda, d.x, {}, rng);
    const auto orc = oracle_resolve(*d.space, d.objective, d.lambda, d.x, GridSpec{1e-4});
    const double mu = 0.5 / d.lambda - d.objective.weak_convexity_alpha.value_or(0.0);
    const double allowed = 1e-4 + std::sqrt(res.certified_gap / mu) + 1e-9;
    const double dev = d.space->distance(res.point, orc.point);
    if (dev > allowed) {
      ok = false;
      detail = "instance " + std::to_string(i) + " (" + d.space->description() + ", " +
               d.objective.description + "): deviation " + fmt(dev) + " > " + fmt(allowed);
    }
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 60.0) {
    ok = false;
    detail += " runtime " + fmt(elapsed) + "s >= 60s";
  }
  report(2, "resolvent vs oracle on 52 random instances", ok, ok ? fmt(elapsed) + "s" : detail);
}

void criterion3_closed_forms() {
  std::mt19937_64 rng(2);
  bool ok = true;
  std::string detail;

  auto e1 = make_space(SpaceSpec::euclidean(1));
  const Objective half_sq = make_objective(e1, ObjectiveSpec::squared_distance(
                                                   Point::vector({0.0}), 0.5));
  const auto j1 = resolve(*e1, half_sq, 1.0, Point::vector({2.0}), {}, rng);
  if (std::abs(j1.point.coords()[0] - 1.0) > 1e-9) {
    ok = false;
    detail = "J_1(2) for y^2/2 = " + fmt(j1.point.coords()[0]);
  }

  const Objective absval = make_objective(e1, ObjectiveSpec::distance(Point::vector({0.0})));
  const auto j2 = resolve(*e1, absval, 0.5, Point::vector({2.0}), {}, rng);
  if (std::abs(j2.point.coords()[0] - 1.5) > 1e-9) {
    ok = false;
    detail += " soft-threshold J_0.5(2) = " + fmt(j2.point.coords()[0]);
  }

  auto sp = make_space(SpaceSpec::spider(3));
  const Objective sq = make_objective(sp, ObjectiveSpec::squared_distance(sp->origin()));
  const auto traj = run(*sp, sq, Point::spider(1, 1.0), Schedule::constant(1.0),
                        StopCriteria{60, 1e-12, {}});
  for (long n = 0; n <= traj.iterations(); ++n) {
    const auto& c = traj.iterates[n].spider_coord();
    const double want = std::pow(3.0, -static_cast<double>(n));
    if (std::abs(c.radius - want) > 1e-9 || (c.radius > 0 && c.leg != 1)) {
      ok = false;
      detail += " spider iterate " + std::to_string(n) + " off by " +
                fmt(std::abs(c.radius - want));
      break;
    }
  }
  report(3, "closed forms: J_1(2)=1 (y^2/2), J_0.5(2)=1.5 (|y|), spider 3^-n", ok, detail);
}

void criterion4_projection_lemma() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<SpaceSpec> specs = {SpaceSpec::euclidean(1), SpaceSpec::euclidean(2),
                                        SpaceSpec::spider(3), SpaceSpec::poincare_ball(2)};
  bool ok = true;
  std::string detail;
  for (const auto& spec : specs) {
    auto space = make_space(spec);
    for (int i = 0; i < 20; ++i) {
      const Point target = space->sample(rng);
      const Objective f =
          i % 2 == 0 ? make_objective(space, ObjectiveSpec::squared_distance(target))
                     : make_objective(space, ObjectiveSpec::gaussian_well(target));
      const double alpha = f.weak_convexity_alpha.value_or(0.0);
      const double lambda =
          alpha > 0.0 ? (0.2 + 0.4 * unit(rng)) / (2.0 * alpha) : 0.2 + 0.4 * unit(rng);
      const Point x = space->sample(rng);
      ResolveOptions opts;
      opts.certified_gap = 1e-13;
      opts.relative_gap = 1e-12;
      const auto res = resolve(*space, f, lambda, x, opts, rng);
      const auto rep =
          check_projection_property(*space, f, lambda, x, res, 100, 1000 + i, 1e-6);
      if (!rep.passed) {
        ok = false;
        detail = space->description() + " instance " + std::to_string(i) + ": max qi " +
                 fmt(rep.max_quasi_inner) + " > " + fmt(rep.threshold) +
                 (rep.inconclusive ? " (inconclusive)" : "");
      }
    }
  }
  report(4, "projection lemma on 20 instances per space", ok, detail);
}

void criterion5_slope_bound() {
  std::mt19937_64 rng(4);
  const auto draws = random_instances(5, 0x510beULL);  // 20 instances
  ProbeOptions tight;
  tight.base_radius_factor = 1e-5;
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const auto& d = draws[i];
    const auto res = resolve(*d.space, d.objective, d.lambda, d.x, {}, rng);
    const auto slope = slope_estimate(*d.space, d.objective, res.point, tight, rng);
    const double bound = d.space->distance(d.x, res.point) / d.lambda + 1e-3;
    if (slope.value > bound) {
      ok = false;
      detail = "instance " + std::to_string(i) + ": slope " + fmt(slope.value) + " > " +
               fmt(bound);
    }
  }
  report(5, "slope bound |df|(J) <= d(x,J)/lambda + 1e-3 on 20 instances", ok, detail);
}

struct ShippedRun {
  std::string name;
  std::shared_ptr<const GeodesicSpace> space;
  Objective objective;
  Trajectory traj;
};

std::vector<ShippedRun> shipped_runs() {
  std::vector<ShippedRun> runs;
  auto add = [&](const std::string& name, std::shared_ptr<const GeodesicSpace> space,
                 Objective f, const Point& x0, const Schedule& sched, StopCriteria stop,
                 RunOptions opts = {}) {
    Trajectory t = run(*space, f, x0, sched, stop, opts);
    runs.push_back(ShippedRun{name, std::move(space), std::move(f), std::move(t)});
  };

  auto e1 = make_space(SpaceSpec::euclidean(1));
  auto e2 = make_space(SpaceSpec::euclidean(2));
  auto sp = make_space(SpaceSpec::spider(3));
  auto ball = make_space(SpaceSpec::poincare_ball(2));

  add("e1 half-quadratic", e1,
      make_objective(e1, ObjectiveSpec::squared_distance(Point::vector({0.0}), 0.5)),
      Point::vector({1.0}), Schedule::constant(1.0), StopCriteria{200, 1e-10, {}});
  add("e1 |y| soft threshold", e1,
      make_objective(e1, ObjectiveSpec::distance(Point::vector({0.0}))), Point::vector({2.0}),
      Schedule::constant(0.5), StopCriteria{200, 1e-10, {}});
  add("e2 quadratic harmonic", e2,
      make_objective(e2, ObjectiveSpec::squared_distance(Point::vector({0.0, 0.0}))),
      Point::vector({1.0, -0.5}), Schedule::harmonic(1.0), StopCriteria{200, 1e-10, {}});
  add("spider quadratic", sp, make_objective(sp, ObjectiveSpec::squared_distance(sp->origin())),
      Point::spider(2, 2.0), Schedule::constant(1.0), StopCriteria{200, 1e-10, {}});
  RunOptions gauss_opts;
  gauss_opts.resolve.relative_gap = 1e-12;
  add("e1 gaussian", e1, make_objective(e1, ObjectiveSpec::gaussian_well(Point::vector({0.0}))),
      Point::vector({1.0}), Schedule::constant(0.25), StopCriteria{300, 1e-10, {}}, gauss_opts);
  add("spider gaussian", sp, make_objective(sp, ObjectiveSpec::gaussian_well(sp->origin())),
      Point::spider(1, 1.5), Schedule::constant(0.3), StopCriteria{300, 1e-10, {}}, gauss_opts);
  add("ball quadratic", ball, make_objective(ball, ObjectiveSpec::squared_distance(ball->origin())),
      Point::vector({0.5, 0.3}), Schedule::constant(0.4), StopCriteria{300, 1e-8, {}},
      gauss_opts);
  add("ball gaussian", ball, make_objective(ball, ObjectiveSpec::gaussian_well(ball->origin())),
      Point::vector({0.4, -0.4}), Schedule::constant(0.3), StopCriteria{300, 1e-8, {}},
      gauss_opts);
  return runs;
}

void criterion6_monotonicity_monitors() {
  bool ok = true;
  std::string detail;
  for (const auto& r : shipped_runs()) {
    for (long n = 1; n <= r.traj.iterations(); ++n) {
      if (!(r.traj.monitors.f_margin[n] >= -1e-8)) {
        ok = false;
        detail = r.name + ": f margin " + fmt(r.traj.monitors.f_margin[n]) + " at n=" +
                 std::to_string(n);
      }
    }
    if (!r.traj.has_reference) continue;
    const Point& tilde = *r.objective.known_minimizer;
    // Certified references: the minimizer and a midpoint toward the final
    // iterate (inside the final sublevel set for these objectives).
    const std::vector<Point> refs = {tilde,
                                     r.space->combine(tilde, r.traj.iterates.back(), 0.5)};
    const auto fej = fejer_check(*r.space, r.objective, r.traj, refs, 1e-8);
    if (!fej.passed) {
      ok = false;
      detail = r.name + ": fejer margin " + fmt(fej.worst_margin);
    }
    const auto til = tilde_inequality_check(*r.space, r.traj, r.objective.known_minimizer, 1e-8);
    if (!til.passed) {
      ok = false;
      detail = r.name + ": tilde residual " + fmt(til.worst_residual) + " thr " +
               fmt(til.threshold);
    }
  }
  report(6, "monotone f, Fejer margins, tilde residuals on every shipped run", ok, detail);
}

void criterion7_strong_qc_rate() {
  bool ok = true;
  std::string detail;
  auto e1 = make_space(SpaceSpec::euclidean(1));
  auto sp = make_space(SpaceSpec::spider(3));

  struct Case {
    std::string name;
    std::shared_ptr<const GeodesicSpace> space;
    Point x0;
    Schedule sched;
  };
  const std::vector<Case> cases = {
      {"e1 constant", e1, Point::vector({1.0}), Schedule::constant(1.0)},
      {"e1 harmonic", e1, Point::vector({1.0}), Schedule::harmonic(1.0)},
      {"spider constant", sp, Point::spider(0, 1.0), Schedule::constant(1.0)},
      {"spider harmonic", sp, Point::spider(0, 1.0), Schedule::harmonic(1.0)},
  };
  for (const auto& c : cases) {
    const Objective f = make_objective(c.space, ObjectiveSpec::squared_distance(
                                                    c.space->origin()));  // alpha = 1
    const auto traj = run(*c.space, f, c.x0, c.sched, StopCriteria{200, 0.0, {}});
    if (traj.iterations() != 200) {
      ok = false;
      detail = c.name + ": expected 200 iterations";
      continue;
    }
    const auto rep =
        strong_qc_rate_check(*c.space, traj, f.known_minimizer, c.sched, f.strong_qc_alpha, 1e-8);
    if (!rep.residuals_passed) {
      ok = false;
      detail = c.name + ": worst contraction residual " + fmt(rep.worst_residual);
    }
    const double d0 = c.space->distance(c.x0, c.space->origin());
    if (!(1.0 * rep.weighted_sum <= d0 * d0 + 1e-8)) {
      ok = false;
      detail = c.name + ": summed bound " + fmt(rep.weighted_sum) + " > " + fmt(d0 * d0);
    }
    if (!(rep.final_over_max < 0.1)) {
      ok = false;
      detail = c.name + ": rate final/max " + fmt(rep.final_over_max);
    }
  }
  report(7, "strong quasi-convex contraction, summability, rate trend (200 iters)", ok, detail);
}

void criterion8_critical_point_minimum() {
  std::mt19937_64 rng(8);
  bool ok = true;
  std::string detail;
  const std::vector<SpaceSpec> specs = {SpaceSpec::euclidean(1), SpaceSpec::spider(3),
                                        SpaceSpec::poincare_ball(2)};
  for (const auto& spec : specs) {
    auto space = make_space(spec);
    const Point target = space->sample(rng);
    // Start within the well's basin: on its far plateau the true slope is
    // below any numerical threshold and the iteration stalls legitimately.
    Point x0 = space->sample(rng);
    const double d0 = space->distance(target, x0);
    if (d0 > 1.2) x0 = space->combine(target, x0, 1.2 / d0);
    for (int kind = 0; kind < 2; ++kind) {
      const Objective f =
          kind == 0 ? make_objective(space, ObjectiveSpec::squared_distance(target))
                    : make_objective(space, ObjectiveSpec::gaussian_well(target));
      const double lambda = f.weak_convexity_alpha.value_or(0.0) > 0.0 ? 0.25 : 0.5;
      RunOptions opts;
      opts.resolve.relative_gap = 1e-12;
      const double eps = spec.kind == SpaceSpec::Kind::poincare_ball ? 1e-8 : 1e-10;
      const auto traj =
          run(*space, f, x0, Schedule::constant(lambda), StopCriteria{2000, eps, {}}, opts);
      const auto cp = critical_point_residual(*space, f, traj, ProbeOptions{}, rng);
      const double fgap = traj.records.back().f_value - f(target);
      if (!cp.conclusive || cp.slope.value > 1e-4 || fgap > 1e-3) {
        ok = false;
        detail = space->description() + " " + f.description + ": slope " +
                 fmt(cp.slope.value) + ", f gap " + fmt(fgap) +
                 (cp.conclusive ? "" : " (inconclusive)");
      }
    }
  }
  report(8, "critical point implies minimum on pseudo-convex runs", ok, detail);
}

void criterion9_convexity_checkers() {
  bool ok = true;
  std::string detail;
  std::mt19937_64 rng(9);

  const std::vector<SpaceSpec> specs = {
      SpaceSpec::euclidean(2), SpaceSpec::euclidean(3), SpaceSpec::poincare_ball(2),
      SpaceSpec::spider(3),
      SpaceSpec::product({SpaceSpec::euclidean(1), SpaceSpec::spider(3)})};
  for (const auto& spec : specs) {
    auto space = make_space(spec);
    const Objective sq = make_objective(space, ObjectiveSpec::squared_distance(space->sample(rng)));
    for (unsigned long long seed = 1; seed <= 10; ++seed) {
      const auto v =
          check_convexity_class(*space, sq, ConvexityClass::strongly_convex, 1.0, 400, seed);
      if (!v.passed) {
        ok = false;
        detail = space->description() + " strongly-convex failed, violation " +
                 fmt(v.max_violation);
      }
    }
  }

  auto e1 = make_space(SpaceSpec::euclidean(1));
  const Objective well = make_objective(e1, ObjectiveSpec::gaussian_well(Point::vector({0.0})));

  // Reference witness from the class definition: x=1, y=2, lambda=1/2.
  const double lhs_ref = well(Point::vector({1.5}));
  const double rhs_ref = 0.5 * well(Point::vector({1.0})) + 0.5 * well(Point::vector({2.0}));
  if (std::abs((lhs_ref - rhs_ref) - 0.0877) > 2e-4) {
    ok = false;
    detail += " reference violation " + fmt(lhs_ref - rhs_ref) + " != 0.0877";
  }

  for (unsigned long long seed = 1; seed <= 10; ++seed) {
    const auto cv = check_convexity_class(*e1, well, ConvexityClass::convex, 0.0, 1000, seed);
    if (cv.passed || !cv.witness) {
      ok = false;
      detail += " convexity not refuted at seed " + std::to_string(seed);
      continue;
    }
    // Re-check the witness from scratch.
    const auto& w = *cv.witness;
    const Point z = e1->combine(w.x, w.y, 1.0 - w.lambda);
    const double lhs = well(z);
    const double rhs = w.lambda * well(w.x) + (1.0 - w.lambda) * well(w.y);
    if (!(lhs - rhs > 1e-9)) {
      ok = false;
      detail += " witness does not re-check at seed " + std::to_string(seed);
    }
    const auto qc = check_convexity_class(*e1, well, ConvexityClass::quasi_convex, 0.0, 1000, seed);
    if (!qc.passed) {
      ok = false;
      detail += " quasi-convexity failed at seed " + std::to_string(seed);
    }
  }
  report(9, "convexity checkers: d^2 strongly convex, gaussian well refuted/quasi-convex", ok,
         detail);
}

int run_cli(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void criterion10_harness_determinism(const std::string& cli) {
  bool ok = true;
  std::string detail;

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ppa_acceptance";
  fs::create_directories(dir);
  const fs::path cfg_path = dir / "config.json";
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({
      "version": 1,
      "space": {"kind": "euclidean", "dim": 1},
      "objective": {"kind": "squared_distance", "target": [0.0]},
      "x0": [1.0],
      "schedule": {"kind": "constant", "value": 1.0},
      "stop": {"max_iterations": 100},
      "monitors": ["fejer", "tilde", "strong_qc", "rate"],
      "seed": 11
    })";
  }

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };

  if (cli.empty()) {
    report(10, "harness determinism and exit-status contract", false,
           "no CLI path provided (argv[1])");
    return;
  }

  const std::string quiet = " > /dev/null 2>&1";
  int code = run_cli(cli + " run --config " + cfg_path.string() + " --out " +
                     (dir / "a").string() + quiet);
  if (code != 0) {
    ok = false;
    detail = "run exit " + std::to_string(code);
  }
  code = run_cli(cli + " run --config " + cfg_path.string() + " --out " + (dir / "b").string() +
                 quiet);
  if (code != 0) ok = false;

  const std::string csv_a = slurp(dir / "a/trajectory.csv");
  if (csv_a != slurp(dir / "b/trajectory.csv") || csv_a.empty()) {
    ok = false;
    detail += " CSVs differ across identical runs";
  }

  code = run_cli(cli + " replay --csv " + (dir / "a/trajectory.csv").string() + " --summary " +
                 (dir / "a/summary.json").string() + quiet);
  if (code != 0) {
    ok = false;
    detail += " clean replay exit " + std::to_string(code);
  }

  // Inject a violation: bump a mid-run dist_to_ref so the Fejer margin
  // flips negative; the replay must exit nonzero.
  {
    std::istringstream in(csv_a);
    std::ostringstream out;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
      if (row == 5) {
        std::vector<std::string> cols;
        std::istringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cols.push_back(c);
        cols[4] = "0.75";
        std::string rebuilt;
        for (std::size_t i = 0; i < cols.size(); ++i) rebuilt += (i ? "," : "") + cols[i];
        out << rebuilt << "\n";
      } else {
        out << line << "\n";
      }
      ++row;
    }
    std::ofstream bad(dir / "corrupted.csv");
    bad << out.str();
  }
  code = run_cli(cli + " replay --csv " + (dir / "corrupted.csv").string() + " --summary " +
                 (dir / "a/summary.json").string() + quiet);
  if (code == 0) {
    ok = false;
    detail += " corrupted replay exited 0";
  }

  report(10, "harness determinism and exit-status contract", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const auto t0 = std::chrono::steady_clock::now();

  criterion1_space_conformance();
  criterion2_oracle_equivalence();
  criterion3_closed_forms();
  criterion4_projection_lemma();
  criterion5_slope_bound();
  criterion6_monotonicity_monitors();
  criterion7_strong_qc_rate();
  criterion8_critical_point_minimum();
  criterion9_convexity_checkers();
  criterion10_harness_determinism(cli);

  std::printf("%d/10 criteria passed in %.1fs\n", 10 - failures, seconds_since(t0));
  return failures;
}
