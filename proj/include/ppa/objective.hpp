#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ppa/space.hpp"

namespace ppa {

/// Declarative description of a shipped objective (part of the config schema).
struct ObjectiveSpec {
  enum class Kind { squared_distance, distance, gaussian_well, ball_indicator, tabulated };

  Kind kind = Kind::squared_distance;
  std::optional<Point> target;  // squared_distance / distance / gaussian_well
  double coefficient = 1.0;

  std::shared_ptr<ObjectiveSpec> inner;   // ball_indicator: restricted objective
  std::optional<Point> indicator_center;  // ball_indicator
  double indicator_radius = 1.0;          // ball_indicator

  std::vector<double> knots;   // tabulated (1-D Euclidean): strictly increasing
  std::vector<double> values;  // tabulated: f at the knots
  std::optional<double> weak_alpha_override;       // tabulated metadata
  std::optional<double> strong_qc_alpha_override;  // tabulated metadata

  static ObjectiveSpec squared_distance(Point target, double coefficient = 1.0);
  static ObjectiveSpec distance(Point target, double coefficient = 1.0);
  static ObjectiveSpec gaussian_well(Point target, double coefficient = 1.0);
  static ObjectiveSpec ball_indicator(ObjectiveSpec inner, Point center, double radius);
  static ObjectiveSpec tabulated(std::vector<double> knots, std::vector<double> values);
};

/// Closed-form identity of an objective that resolvent solvers may exploit.
struct StructuredForm {
  ObjectiveSpec::Kind kind;
  Point target;
  double coefficient = 1.0;
};

/// Extended-real-valued objective with declared regularity metadata.
///
/// The evaluator must be pure and may return +infinity outside the domain
/// D(f); it must be finite somewhere (proper). `weak_convexity_alpha` is the
/// alpha of the weak-convexity defect inequality (0 for plain convex
/// functions); `strong_qc_alpha` the alpha of strong quasi-convexity.
struct Objective {
  std::function<double(const Point&)> evaluator;
  std::optional<double> weak_convexity_alpha;
  std::optional<double> strong_qc_alpha;
  std::optional<Point> known_minimizer;
  std::string description;
  std::optional<StructuredForm> form;

  double operator()(const Point& x) const { return evaluator(x); }
};

/// Checked evaluation: throws DomainError when x is not in the space.
/// A +infinity result means "outside D(f)" and is not an error.
double evaluate(const GeodesicSpace& space, const Objective& f, const Point& x);

/// Build a shipped objective over `space`. Throws ConfigError on malformed
/// specs (missing target, nonpositive coefficient, unsorted knots, ...).
Objective make_objective(std::shared_ptr<const GeodesicSpace> space, const ObjectiveSpec& spec);

struct ProbeOptions {
  double base_radius_factor = 1e-2;  // r0 = factor * (1 + scale(x))
  int shells = 10;                   // radii r0 * 2^-k, k = 0..shells
  int directions = 32;               // probes per shell
};

/// Finite-probe surrogate of the slope (scalar subdifferential)
///   |df|(x) = limsup_{y->x} max{f(x)-f(y), 0} / d(x,y).
/// `value` is the max ratio over all shells; `shell_max` records the
/// per-shell maxima (inner shells last) so callers can judge convergence of
/// the limsup surrogate.
struct SlopeEstimate {
  double value = 0.0;
  std::vector<double> shell_radii;
  std::vector<double> shell_max;
};

SlopeEstimate slope_estimate(const GeodesicSpace& space, const Objective& f, const Point& x,
                             const ProbeOptions& probe, std::mt19937_64& rng);

enum class ConvexityClass {
  convex,
  strictly_convex,
  weakly_convex,
  strongly_convex,
  quasi_convex,
  strongly_quasi_convex,
  pseudo_convex,
};

std::string to_string(ConvexityClass cls);

/// Re-checkable certificate attached to a failed (or inconclusive) verdict.
/// For the interpolation classes: f(lambda x (+) (1-lambda) y) = lhs exceeds
/// the class bound rhs. For pseudo-convexity: the pair (x, y) for which no
/// (beta, delta) on the search grid certifies the descent rate at t.
struct ConvexityWitness {
  Point x;
  Point y;
  double lambda = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  double t = 0.0;
};

struct ConvexityVerdict {
  ConvexityClass class_checked = ConvexityClass::convex;
  double alpha = 0.0;
  bool passed = false;
  /// Pseudo-convexity is existential; a failed witness search is reported
  /// as inconclusive, never as a refutation.
  bool inconclusive = false;
  std::optional<ConvexityWitness> witness;
  long samples = 0;
  double max_violation = 0.0;
};

/// Sampled check of one of the convexity classes. `alpha` is used by the
/// weakly/strongly (quasi-)convex classes and ignored otherwise.
ConvexityVerdict check_convexity_class(const GeodesicSpace& space, const Objective& f,
                                       ConvexityClass cls, double alpha, long samples,
                                       unsigned long long seed, double tolerance = 1e-9);

}  // namespace ppa
