#pragma once

#include <optional>
#include <random>

#include "ppa/objective.hpp"
#include "ppa/space.hpp"

namespace ppa {

struct ResolveOptions {
  /// Absolute certified-gap target; defaults to the space's stated value
  /// (1e-10 Euclidean, 1e-8 spider, 1e-6 Poincare ball).
  std::optional<double> certified_gap;
  /// Scale-aware refinement: keep improving until the certificate is below
  /// relative_gap * d(x, y)^2 so late PPA steps stay accurate relative to
  /// their own scale.
  double relative_gap = 1e-10;
  long max_evaluations = 100000;
  int directions = 16;
  int golden_iterations = 40;
  std::optional<Point> start;  // inner start; defaults to x
};

struct ResolventResult {
  Point point;             // J_lambda x
  double objective_value;  // f(J)
  double proximal_value;   // f(J) + d^2(x,J)/(2 lambda)
  long inner_iterations;   // inner-objective evaluations (0 for closed forms)
  double certified_gap;    // upper bound on proximal suboptimality
  bool closed_form;
};

/// Inner solve ran out of budget before certifying the requested gap; carries
/// the best iterate found.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, ResolventResult best)
      : Error(message), best_(std::move(best)) {}
  const ResolventResult& best() const { return best_; }

 private:
  ResolventResult best_;
};

/// Proximal point J_lambda x = argmin_y { f(y) + d^2(x,y)/(2 lambda) }.
///
/// Requires lambda < 1/(2 alpha) when f declares weak-convexity alpha > 0
/// (StepSizeError otherwise); the inner function is then mu-strongly convex
/// with mu = 1/(2 lambda) - alpha. Closed forms are registered for the
/// squared_distance and distance objectives on Euclidean and spider spaces
/// (gap 0); everything else runs a derivative-free geodesic descent whose
/// stopping certificate combines the probe descent residual with the
/// strong-convexity bound g(y) - g* <= residual^2 / (2 mu).
ResolventResult resolve(const GeodesicSpace& space, const Objective& f, double lambda,
                        const Point& x, const ResolveOptions& opts, std::mt19937_64& rng);

struct GridSpec {
  double step = 1e-4;       // target resolution (metric units)
  double radius = 0.0;      // search-ball radius around x; 0 = auto bound
  long max_evaluations = 4000000;
};

struct OracleResult {
  Point point;
  double value;        // proximal value at the grid optimum
  double resolution;   // final grid pitch actually reached
  long evaluations;
};

/// Independent brute-force check of `resolve`: exhaustive grid passes over a
/// ball that provably contains the minimizer (d^2(x,J)/(2 lambda) <=
/// f(x) - inf f), shrinking the window around the incumbent until the pitch
/// reaches grid.step. Supports Euclidean/Poincare dimensions 1-2 and spiders;
/// anything else throws CapabilityError.
OracleResult oracle_resolve(const GeodesicSpace& space, const Objective& f, double lambda,
                            const Point& x, const GridSpec& grid = {});

struct ProjectionReport {
  double max_quasi_inner = 0.0;  // worst <J z, J x> over accepted samples
  double threshold = 0.0;        // tol * (1 + d(J,x))
  long accepted_samples = 0;
  bool passed = false;
  bool inconclusive = false;  // no point of the sublevel set was found
};

/// Sampled check of the projection lemma: for every z with f(z) <= f(J),
/// <Jz, Jx> <= 0, i.e. J is the metric projection of x onto the sublevel
/// set. Samples mix plain draws with bisection toward the sublevel boundary
/// (where the inequality is tight).
ProjectionReport check_projection_property(const GeodesicSpace& space, const Objective& f,
                                           double lambda, const Point& x,
                                           const ResolventResult& result, long samples,
                                           unsigned long long seed, double tolerance = 1e-6);

}  // namespace ppa
