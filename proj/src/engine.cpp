#include "ppa/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ppa {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

// ---------------------------------------------------------------------------
// Schedule
// ---------------------------------------------------------------------------

Schedule Schedule::constant(double value) {
  Schedule s;
  s.kind = Kind::constant;
  s.value = value;
  return s;
}

Schedule Schedule::sequence(std::vector<double> values, bool divergent_sum) {
  Schedule s;
  s.kind = Kind::sequence;
  s.values = std::move(values);
  s.divergent = divergent_sum;
  return s;
}

Schedule Schedule::harmonic(double scale) {
  Schedule s;
  s.kind = Kind::harmonic;
  s.value = scale;
  return s;
}

double Schedule::lambda(long n) const {
  if (n < 0) throw ArgumentError("Schedule::lambda: negative index");
  switch (kind) {
    case Kind::constant:
      return value;
    case Kind::harmonic:
      return value / static_cast<double>(n + 1);
    case Kind::sequence:
      if (static_cast<std::size_t>(n) >= values.size()) {
        throw ArgumentError("Schedule::lambda: index " + std::to_string(n) +
                            " past the end of a " + std::to_string(values.size()) +
                            "-element sequence");
      }
      return values[n];
  }
  throw ArgumentError("Schedule::lambda: unknown kind");
}

std::optional<long> Schedule::length() const {
  if (kind == Kind::sequence) return static_cast<long>(values.size());
  return std::nullopt;
}

void Schedule::validate(std::optional<double> weak_alpha, long horizon) const {
  const double alpha = weak_alpha.value_or(0.0);
  long count = horizon;
  if (const auto len = length()) count = std::min(count, *len);
  for (long n = 0; n < count; ++n) {
    const double l = lambda(n);
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw StepSizeError("schedule: lambda_" + std::to_string(n) + " = " + std::to_string(l) +
                          " must be positive and finite");
    }
    if (alpha > 0.0 && l >= 0.5 / alpha) {
      throw StepSizeError("schedule: lambda_" + std::to_string(n) + " = " + std::to_string(l) +
                          " violates lambda < 1/(2*alpha) = " + std::to_string(0.5 / alpha));
    }
    if (lower_bound && l < *lower_bound - 1e-15) {
      throw StepSizeError("schedule: lambda_" + std::to_string(n) + " = " + std::to_string(l) +
                          " below the declared lower bound " + std::to_string(*lower_bound));
    }
  }
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::step_size: return "step_size";
    case StopReason::slope: return "slope";
    case StopReason::schedule_exhausted: return "schedule_exhausted";
    case StopReason::monitor_abort: return "monitor_abort";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

Trajectory run(const GeodesicSpace& space, const Objective& f, const Point& x0,
               const Schedule& schedule, const StopCriteria& stop, const RunOptions& opts) {
  space.require_member(x0, "run");
  const double f0 = f(x0);
  if (!(f0 < std::numeric_limits<double>::infinity())) {
    throw DomainError("run: x0 is outside the domain of " + f.description);
  }
  schedule.validate(f.weak_convexity_alpha, stop.max_iterations);

  std::mt19937_64 rng(opts.seed);
  const std::optional<Point>& ref = f.known_minimizer;
  const std::optional<double> alpha = f.strong_qc_alpha;

  Trajectory traj;
  traj.has_reference = ref.has_value();
  traj.iterates.push_back(x0);
  traj.records.push_back(StepRecord{0, 0.0, f0, 0.0, 0, 0.0});

  auto& mon = traj.monitors;
  const double nan_or = traj.has_reference ? 0.0 : kNaN;
  const double d0 = ref ? space.distance(x0, *ref) : kNaN;
  mon.dist_to_ref.push_back(d0);
  mon.fejer_margin.push_back(nan_or);
  mon.tilde_residual.push_back(nan_or);
  mon.sqc_residual.push_back(alpha && ref ? 0.0 : kNaN);
  mon.rate_value.push_back(traj.has_reference ? 0.0 : kNaN);
  mon.f_margin.push_back(0.0);

  const double tilde_scale = ref ? 1.0 + d0 * d0 : 1.0;
  double lambda_sum = 0.0;
  traj.stop_reason = StopReason::max_iterations;

  for (long n = 1; n <= stop.max_iterations; ++n) {
    if (const auto len = schedule.length(); len && n - 1 >= *len) {
      traj.stop_reason = StopReason::schedule_exhausted;
      break;
    }
    const double lambda = schedule.lambda(n - 1);
    const Point prev = traj.iterates.back();  // by value: push_back below reallocates

    ResolventResult res{prev, 0, 0, 0, 0, false};
    try {
      res = resolve(space, f, lambda, prev, opts.resolve, rng);
    } catch (const ConvergenceError& e) {
      throw RunError("run: resolvent failed at iteration " + std::to_string(n) + ": " + e.what(),
                     std::move(traj));
    }
    const Point x = res.point;
    const double fx = res.objective_value;
    const double step = space.distance(x, prev);

    traj.iterates.push_back(x);
    traj.records.push_back(StepRecord{n, lambda, fx, step, res.inner_iterations,
                                      res.certified_gap});
    lambda_sum += lambda;

    const double f_prev = traj.records[n - 1].f_value;
    mon.f_margin.push_back(f_prev - fx);

    double violation = std::max(0.0, fx - f_prev);
    if (ref) {
      const double d_prev = mon.dist_to_ref[n - 1];
      const double d = space.distance(x, *ref);
      const double fejer = d_prev - d;
      const double tilde = step * step + d * d - d_prev * d_prev;
      mon.dist_to_ref.push_back(d);
      mon.fejer_margin.push_back(fejer);
      mon.tilde_residual.push_back(tilde);
      mon.rate_value.push_back(std::sqrt(lambda_sum) * d);
      violation = std::max(violation, -fejer);
      violation = std::max(violation, tilde / tilde_scale);
      if (alpha) {
        const double sqc = *alpha * lambda * d * d - (d_prev * d_prev - d * d);
        mon.sqc_residual.push_back(sqc);
        violation = std::max(violation, sqc);
      } else {
        mon.sqc_residual.push_back(kNaN);
      }
    } else {
      mon.dist_to_ref.push_back(kNaN);
      mon.fejer_margin.push_back(kNaN);
      mon.tilde_residual.push_back(kNaN);
      mon.sqc_residual.push_back(kNaN);
      mon.rate_value.push_back(kNaN);
    }

    if (opts.oracle_step) {
      const auto oracle = oracle_resolve(space, f, lambda, prev, GridSpec{*opts.oracle_step});
      const double dev = space.distance(x, oracle.point);
      traj.oracle_max_deviation =
          std::max(traj.oracle_max_deviation.value_or(0.0), dev);
    }

    if (opts.abort_on_violation && violation > 100.0 * opts.monitor_tolerance) {
      traj.stop_reason = StopReason::monitor_abort;
      break;
    }
    if (step < stop.step_epsilon) {
      traj.stop_reason = StopReason::step_size;
      break;
    }
    if (stop.slope_epsilon) {
      const auto slope = slope_estimate(space, f, x, ProbeOptions{}, rng);
      if (slope.value < *stop.slope_epsilon) {
        traj.final_slope = slope;
        traj.stop_reason = StopReason::slope;
        break;
      }
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Monitors over a finished trajectory
// ---------------------------------------------------------------------------

FejerReport fejer_check(const GeodesicSpace& space, const Objective& f, const Trajectory& traj,
                        const std::vector<Point>& refs, double tol) {
  if (traj.iterates.empty()) throw ArgumentError("fejer_check: empty trajectory");
  double min_f = std::numeric_limits<double>::infinity();
  long argmin_n = 0;
  for (const auto& rec : traj.records) {
    if (rec.f_value < min_f) {
      min_f = rec.f_value;
      argmin_n = rec.n;
    }
  }
  for (std::size_t r = 0; r < refs.size(); ++r) {
    const double fz = evaluate(space, f, refs[r]);
    if (fz > min_f) {
      throw ArgumentError("fejer_check: reference " + std::to_string(r) + " has f(z) = " +
                          std::to_string(fz) + " > f(x_" + std::to_string(argmin_n) +
                          ") = " + std::to_string(min_f));
    }
  }

  FejerReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < refs.size(); ++r) {
    std::vector<double> margins;
    double d_prev = space.distance(traj.iterates[0], refs[r]);
    for (std::size_t n = 1; n < traj.iterates.size(); ++n) {
      const double d = space.distance(traj.iterates[n], refs[r]);
      const double margin = d_prev - d;
      margins.push_back(margin);
      if (margin < report.worst_margin) {
        report.worst_margin = margin;
        report.worst_index = static_cast<long>(n);
        report.worst_ref = r;
      }
      d_prev = d;
    }
    report.margins.push_back(std::move(margins));
  }
  if (traj.iterates.size() <= 1 || refs.empty()) report.worst_margin = 0.0;
  report.passed = report.worst_margin >= -tol;
  return report;
}

TildeReport tilde_inequality_check(const GeodesicSpace& space, const Trajectory& traj,
                                   const std::optional<Point>& x_tilde, double tol) {
  if (!x_tilde) {
    throw CapabilityError("tilde_inequality_check: no known minimizer available");
  }
  if (traj.iterates.empty()) throw ArgumentError("tilde_inequality_check: empty trajectory");

  TildeReport report;
  const double d0 = space.distance(traj.iterates[0], *x_tilde);
  report.threshold = tol * (1.0 + d0 * d0);
  report.worst_residual = -std::numeric_limits<double>::infinity();
  report.max_quasi_inner = -std::numeric_limits<double>::infinity();
  double d_prev = d0;
  for (std::size_t n = 1; n < traj.iterates.size(); ++n) {
    const double step = space.distance(traj.iterates[n], traj.iterates[n - 1]);
    const double d = space.distance(traj.iterates[n], *x_tilde);
    const double residual = step * step + d * d - d_prev * d_prev;
    report.residuals.push_back(residual);
    if (residual > report.worst_residual) {
      report.worst_residual = residual;
      report.worst_index = static_cast<long>(n);
    }
    // Independent route through the quasi-linearization pairing.
    const double qi =
        quasi_inner(space, traj.iterates[n], *x_tilde, traj.iterates[n], traj.iterates[n - 1]);
    report.max_quasi_inner = std::max(report.max_quasi_inner, qi);
    d_prev = d;
  }
  if (report.residuals.empty()) {
    report.worst_residual = 0.0;
    report.max_quasi_inner = 0.0;
  }
  report.passed = report.worst_residual <= report.threshold &&
                  report.max_quasi_inner <= report.threshold;
  return report;
}

RateReport strong_qc_rate_check(const GeodesicSpace& space, const Trajectory& traj,
                                const std::optional<Point>& x_tilde, const Schedule& schedule,
                                std::optional<double> alpha, double tol) {
  if (!alpha) throw CapabilityError("strong_qc_rate_check: objective declares no strong qc alpha");
  if (!x_tilde) throw CapabilityError("strong_qc_rate_check: no known minimizer available");
  if (!schedule.divergent) {
    throw CapabilityError("strong_qc_rate_check: schedule is not declared sum-divergent");
  }
  if (traj.iterates.size() < 2) throw ArgumentError("strong_qc_rate_check: trajectory too short");

  RateReport report;
  const double d0 = space.distance(traj.iterates[0], *x_tilde);
  report.sum_bound = d0 * d0 / *alpha;
  report.rate_series.push_back(0.0);

  double d_prev = d0;
  double lambda_sum = 0.0;
  for (std::size_t n = 1; n < traj.iterates.size(); ++n) {
    const double lambda = traj.records[n].lambda;
    const double d = space.distance(traj.iterates[n], *x_tilde);
    const double residual = *alpha * lambda * d * d - (d_prev * d_prev - d * d);
    report.residuals.push_back(residual);
    report.worst_residual = std::max(report.worst_residual, residual);
    report.weighted_sum += lambda * d * d;
    lambda_sum += lambda;
    report.rate_series.push_back(std::sqrt(lambda_sum) * d);
    d_prev = d;
  }

  report.residuals_passed = report.worst_residual <= tol;
  report.sum_passed = *alpha * report.weighted_sum <= d0 * d0 + tol;

  double rate_max = 0.0;
  for (std::size_t n = 1; n < report.rate_series.size(); ++n) {
    rate_max = std::max(rate_max, report.rate_series[n]);
  }
  report.final_over_max = rate_max > 0.0 ? report.rate_series.back() / rate_max : 0.0;
  report.eventually_decreasing = true;
  const std::size_t start = report.rate_series.size() - report.rate_series.size() / 4;
  for (std::size_t n = std::max<std::size_t>(start, 1); n + 1 < report.rate_series.size(); ++n) {
    if (report.rate_series[n + 1] > report.rate_series[n] + 1e-12 * (1.0 + rate_max)) {
      report.eventually_decreasing = false;
      break;
    }
  }
  return report;
}

CriticalPointReport critical_point_residual(const GeodesicSpace& space, const Objective& f,
                                            const Trajectory& traj, const ProbeOptions& probe,
                                            std::mt19937_64& rng) {
  if (traj.iterates.empty()) throw ArgumentError("critical_point_residual: empty trajectory");
  CriticalPointReport report;
  report.slope = slope_estimate(space, f, traj.iterates.back(), probe, rng);
  report.conclusive =
      traj.stop_reason == StopReason::step_size || traj.stop_reason == StopReason::slope;
  return report;
}

std::vector<double> weighted_tail_products(const std::vector<double>& a,
                                           const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw ArgumentError("weighted_tail_products: sequences must have equal length");
  }
  std::vector<double> out(a.size());
  double partial = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    partial += b[n];
    out[n] = partial * a[n];
  }
  return out;
}

}  // namespace ppa
