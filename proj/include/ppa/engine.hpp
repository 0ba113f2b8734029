#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ppa/objective.hpp"
#include "ppa/resolvent.hpp"
#include "ppa/space.hpp"

namespace ppa {

/// Step-size sequence {lambda_n}. When the objective declares weak-convexity
/// alpha > 0, admissibility requires lambda_n < 1/(2 alpha) (strict, matching
/// the resolvent's existence bound); a declared lower bound lambda-bar is
/// checked over the run horizon.
struct Schedule {
  enum class Kind { constant, sequence, harmonic };

  Kind kind = Kind::constant;
  double value = 1.0;               // constant value / harmonic scale
  std::vector<double> values;       // explicit sequence
  std::optional<double> lower_bound;
  bool divergent = true;            // whether sum lambda_n = +inf is intended

  static Schedule constant(double value);
  static Schedule sequence(std::vector<double> values, bool divergent_sum);
  static Schedule harmonic(double scale);  // lambda_n = scale/(n+1)

  double lambda(long n) const;             // ArgumentError past a finite sequence
  std::optional<long> length() const;      // finite only for explicit sequences
  void validate(std::optional<double> weak_alpha, long horizon) const;
};

struct StopCriteria {
  long max_iterations = 10000;
  double step_epsilon = 1e-10;               // stop when d(x_n, x_{n-1}) < eps
  std::optional<double> slope_epsilon;       // optional slope-based stop
};

enum class StopReason {
  max_iterations,
  step_size,
  slope,
  schedule_exhausted,
  monitor_abort,
};

std::string to_string(StopReason reason);

struct StepRecord {
  long n = 0;
  double lambda = 0.0;          // lambda_{n-1} used to produce x_n (0 at n=0)
  double f_value = 0.0;
  double step_distance = 0.0;   // d(x_n, x_{n-1})
  long inner_iterations = 0;
  double certified_gap = 0.0;
};

/// Per-iteration monitor series, aligned with the step records; entries that
/// are undefined at n = 0 are stored as 0, reference-dependent series are
/// NaN when no known minimizer is available.
struct MonitorSeries {
  std::vector<double> dist_to_ref;    // d(x_n, x~)
  std::vector<double> fejer_margin;   // d(x_{n-1}, x~) - d(x_n, x~)
  std::vector<double> tilde_residual; // d^2(x_n,x_{n-1}) + d^2(x_n,x~) - d^2(x_{n-1},x~)
  std::vector<double> sqc_residual;   // alpha*lambda*d^2(x_n,x~) - (d^2(x_{n-1},x~) - d^2(x_n,x~))
  std::vector<double> rate_value;     // sqrt(sum lambda column) * d(x_n, x~)
  std::vector<double> f_margin;       // f(x_{n-1}) - f(x_n)
};

struct RunOptions {
  ResolveOptions resolve;
  double monitor_tolerance = 1e-8;
  bool abort_on_violation = false;        // abort when violation > 100x tolerance
  std::optional<double> oracle_step;      // per-step oracle cross-check grid
  unsigned long long seed = 1;
};

struct Trajectory {
  std::vector<Point> iterates;
  std::vector<StepRecord> records;
  MonitorSeries monitors;
  StopReason stop_reason = StopReason::max_iterations;
  std::optional<SlopeEstimate> final_slope;
  std::optional<double> oracle_max_deviation;
  bool has_reference = false;  // monitor series are populated against x~

  long iterations() const { return static_cast<long>(records.size()) - 1; }
};

/// A resolvent failure mid-run, carrying the trajectory built so far.
class RunError : public Error {
 public:
  RunError(const std::string& message, Trajectory partial)
      : Error(message), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

/// Proximal point iteration x_{n+1} = J_{lambda_n} x_n from x0 until a stop
/// criterion fires. Monitors are computed online against the objective's
/// known minimizer (when present) and never alter the iteration.
Trajectory run(const GeodesicSpace& space, const Objective& f, const Point& x0,
               const Schedule& schedule, const StopCriteria& stop, const RunOptions& opts = {});

struct FejerReport {
  std::vector<std::vector<double>> margins;  // margins[ref][n], n >= 1
  double worst_margin = 0.0;
  long worst_index = 0;
  std::size_t worst_ref = 0;
  bool passed = false;
};

/// Fejer monotonicity of the trajectory with respect to reference points
/// whose value never exceeds the run's values (checked; ArgumentError names
/// the offending reference and iteration otherwise).
FejerReport fejer_check(const GeodesicSpace& space, const Objective& f, const Trajectory& traj,
                        const std::vector<Point>& refs, double tol);

struct TildeReport {
  std::vector<double> residuals;  // n >= 1
  double worst_residual = 0.0;
  long worst_index = 0;
  double max_quasi_inner = 0.0;   // the equivalent <x_n x~, x_n x_{n-1}> route
  double threshold = 0.0;
  bool passed = false;
};

/// The proof inequality d^2(x_n,x_{n-1}) - d^2(x_{n-1},x~) + d^2(x_n,x~) <= 0
/// at a minimizer x~, checked both directly and through the equivalent
/// quasi-linearization sign. CapabilityError when x~ is absent.
TildeReport tilde_inequality_check(const GeodesicSpace& space, const Trajectory& traj,
                                   const std::optional<Point>& x_tilde, double tol);

struct RateReport {
  std::vector<double> residuals;    // alpha lambda d^2 contraction residuals
  double worst_residual = 0.0;
  double weighted_sum = 0.0;        // sum lambda_{n-1} d^2(x_n, x~)
  double sum_bound = 0.0;           // d^2(x_0, x~)/alpha
  std::vector<double> rate_series;  // sqrt(partial lambda sums) * d(x_n, x~)
  double final_over_max = 0.0;
  bool residuals_passed = false;
  bool sum_passed = false;
  bool eventually_decreasing = false;
};

/// Strong quasi-convexity contraction and the summability/rate consequences:
/// per-step alpha lambda_{n-1} d^2(x_n,x~) <= d^2(x_{n-1},x~) - d^2(x_n,x~),
/// the summed bound, and the finite-horizon o((sum lambda)^(-1/2)) surrogate.
RateReport strong_qc_rate_check(const GeodesicSpace& space, const Trajectory& traj,
                                const std::optional<Point>& x_tilde, const Schedule& schedule,
                                std::optional<double> alpha, double tol);

struct CriticalPointReport {
  SlopeEstimate slope;
  bool conclusive = false;  // false when the run stopped on budget only
};

/// Slope residual at the final iterate; small values certify an approximate
/// critical point when the run stopped by a convergence criterion.
CriticalPointReport critical_point_residual(const GeodesicSpace& space, const Objective& f,
                                            const Trajectory& traj, const ProbeOptions& probe,
                                            std::mt19937_64& rng);

/// The real-sequence lemma surrogate: c_n = (sum_{k<=n} b_k) * a_n for
/// positive a (nonincreasing, -> 0) and b with sum a_n b_n < inf; the lemma
/// asserts c_n -> 0.
std::vector<double> weighted_tail_products(const std::vector<double>& a,
                                           const std::vector<double>& b);

}  // namespace ppa
