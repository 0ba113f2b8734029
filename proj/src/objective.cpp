#include "ppa/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ppa/spaces.hpp"

namespace ppa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

// ---------------------------------------------------------------------------
// ObjectiveSpec builders
// ---------------------------------------------------------------------------

ObjectiveSpec ObjectiveSpec::squared_distance(Point target, double coefficient) {
  ObjectiveSpec s;
  s.kind = Kind::squared_distance;
  s.target = std::move(target);
  s.coefficient = coefficient;
  return s;
}

ObjectiveSpec ObjectiveSpec::distance(Point target, double coefficient) {
  ObjectiveSpec s;
  s.kind = Kind::distance;
  s.target = std::move(target);
  s.coefficient = coefficient;
  return s;
}

ObjectiveSpec ObjectiveSpec::gaussian_well(Point target, double coefficient) {
  ObjectiveSpec s;
  s.kind = Kind::gaussian_well;
  s.target = std::move(target);
  s.coefficient = coefficient;
  return s;
}

ObjectiveSpec ObjectiveSpec::ball_indicator(ObjectiveSpec inner, Point center, double radius) {
  ObjectiveSpec s;
  s.kind = Kind::ball_indicator;
  s.inner = std::make_shared<ObjectiveSpec>(std::move(inner));
  s.indicator_center = std::move(center);
  s.indicator_radius = radius;
  return s;
}

ObjectiveSpec ObjectiveSpec::tabulated(std::vector<double> knots, std::vector<double> values) {
  ObjectiveSpec s;
  s.kind = Kind::tabulated;
  s.knots = std::move(knots);
  s.values = std::move(values);
  return s;
}

// ---------------------------------------------------------------------------
// make_objective
// ---------------------------------------------------------------------------

double evaluate(const GeodesicSpace& space, const Objective& f, const Point& x) {
  space.require_member(x, "evaluate");
  return f(x);
}

Objective make_objective(std::shared_ptr<const GeodesicSpace> space, const ObjectiveSpec& spec) {
  if (!space) throw ConfigError("make_objective: null space");

  auto require_target = [&](const char* kind) -> Point {
    if (!spec.target) throw ConfigError(std::string("make_objective: ") + kind + " needs a target point");
    if (!space->contains(*spec.target)) {
      throw ConfigError(std::string("make_objective: ") + kind + " target " +
                        spec.target->to_string() + " is not in " + space->description());
    }
    return *spec.target;
  };
  const double c = spec.coefficient;
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw ConfigError("make_objective: coefficient must be positive and finite");
  }

  Objective f;
  switch (spec.kind) {
    case ObjectiveSpec::Kind::squared_distance: {
      const Point p = require_target("squared_distance");
      f.evaluator = [space, p, c](const Point& x) {
        const double d = space->distance(x, p);
        return c * d * d;
      };
      f.weak_convexity_alpha = 0.0;  // convex
      f.strong_qc_alpha = c;         // c-strongly convex, hence c-strongly quasi-convex
      f.known_minimizer = p;
      f.description = "squared_distance(c=" + std::to_string(c) + ")";
      f.form = StructuredForm{ObjectiveSpec::Kind::squared_distance, p, c};
      return f;
    }
    case ObjectiveSpec::Kind::distance: {
      const Point p = require_target("distance");
      f.evaluator = [space, p, c](const Point& x) { return c * space->distance(x, p); };
      f.weak_convexity_alpha = 0.0;
      f.known_minimizer = p;
      f.description = "distance(c=" + std::to_string(c) + ")";
      f.form = StructuredForm{ObjectiveSpec::Kind::distance, p, c};
      return f;
    }
    case ObjectiveSpec::Kind::gaussian_well: {
      const Point p = require_target("gaussian_well");
      // c*(1 - exp(-d^2)); expm1 keeps full precision near the minimum.
      f.evaluator = [space, p, c](const Point& x) {
        const double d = space->distance(x, p);
        return -c * std::expm1(-d * d);
      };
      // |(c(1-e^{-t^2}))''| <= 2c and d(., p) is 1-Lipschitz convex, which
      // gives the weak-convexity defect c along geodesics.
      f.weak_convexity_alpha = c;
      f.known_minimizer = p;
      f.description = "gaussian_well(c=" + std::to_string(c) + ")";
      f.form = StructuredForm{ObjectiveSpec::Kind::gaussian_well, p, c};
      return f;
    }
    case ObjectiveSpec::Kind::ball_indicator: {
      if (!spec.inner) throw ConfigError("make_objective: ball_indicator needs an inner objective");
      if (!spec.indicator_center || !space->contains(*spec.indicator_center)) {
        throw ConfigError("make_objective: ball_indicator needs a center inside the space");
      }
      if (!(spec.indicator_radius > 0.0)) {
        throw ConfigError("make_objective: ball_indicator radius must be positive");
      }
      const Objective inner = make_objective(space, *spec.inner);
      const Point center = *spec.indicator_center;
      const double radius = spec.indicator_radius;
      f.evaluator = [space, inner_eval = inner.evaluator, center, radius](const Point& x) {
        if (space->distance(x, center) > radius) return kInf;
        return inner_eval(x);
      };
      // Restriction to a (convex) ball preserves the defect inequalities.
      f.weak_convexity_alpha = inner.weak_convexity_alpha;
      f.strong_qc_alpha = inner.strong_qc_alpha;
      if (inner.known_minimizer &&
          space->distance(*inner.known_minimizer, center) <= radius) {
        f.known_minimizer = inner.known_minimizer;
      }
      f.description = "ball_indicator(" + inner.description + ")";
      return f;
    }
    case ObjectiveSpec::Kind::tabulated: {
      const auto* euclid = dynamic_cast<const EuclideanSpace*>(space.get());
      if (!euclid || euclid->dim() != 1) {
        throw ConfigError("make_objective: tabulated objectives require euclidean dimension 1");
      }
      if (spec.knots.size() < 2 || spec.knots.size() != spec.values.size()) {
        throw ConfigError("make_objective: tabulated needs >= 2 knots matching values");
      }
      if (!std::is_sorted(spec.knots.begin(), spec.knots.end()) ||
          std::adjacent_find(spec.knots.begin(), spec.knots.end()) != spec.knots.end()) {
        throw ConfigError("make_objective: tabulated knots must be strictly increasing");
      }
      for (double v : spec.values) {
        if (!std::isfinite(v)) throw ConfigError("make_objective: tabulated values must be finite");
      }
      const std::vector<double> knots = spec.knots;
      const std::vector<double> values = spec.values;
      f.evaluator = [knots, values](const Point& x) {
        const double v = x.coords()[0];
        if (v < knots.front() || v > knots.back()) return kInf;
        const auto it = std::upper_bound(knots.begin(), knots.end(), v);
        const std::size_t hi = std::min<std::size_t>(it - knots.begin(), knots.size() - 1);
        const std::size_t lo = hi - (hi > 0 ? 1 : 0);
        if (hi == lo) return values[lo];
        const double w = (v - knots[lo]) / (knots[hi] - knots[lo]);
        return values[lo] + w * (values[hi] - values[lo]);
      };
      f.weak_convexity_alpha = spec.weak_alpha_override;
      f.strong_qc_alpha = spec.strong_qc_alpha_override;
      const std::size_t best =
          std::min_element(values.begin(), values.end()) - values.begin();
      f.known_minimizer = Point::vector({knots[best]});
      f.description = "tabulated(" + std::to_string(knots.size()) + " knots)";
      return f;
    }
  }
  throw ConfigError("make_objective: unknown objective kind");
}

// ---------------------------------------------------------------------------
// Slope estimate
// ---------------------------------------------------------------------------

SlopeEstimate slope_estimate(const GeodesicSpace& space, const Objective& f, const Point& x,
                             const ProbeOptions& probe, std::mt19937_64& rng) {
  space.require_member(x, "slope_estimate");
  const double fx = f(x);
  if (!(fx < kInf)) {
    throw DomainError("slope_estimate: x is outside the domain of " + f.description);
  }

  SlopeEstimate est;
  const double r0 = probe.base_radius_factor * (1.0 + space.scale(x));
  for (int k = 0; k <= probe.shells; ++k) {
    const double r = r0 * std::pow(2.0, -k);
    double shell = 0.0;
    for (const Direction& dir : space.probe_directions(x, probe.directions, rng)) {
      const Point y = dir.at(std::min(r, dir.max_radius));
      const double dxy = space.distance(x, y);
      if (!(dxy > 0.0)) continue;
      const double fy = f(y);
      const double num = std::max(fx - fy, 0.0);  // f(y) = +inf contributes 0
      shell = std::max(shell, num / dxy);
    }
    est.shell_radii.push_back(r);
    est.shell_max.push_back(shell);
    est.value = std::max(est.value, shell);
  }
  return est;
}

// ---------------------------------------------------------------------------
// Convexity class checkers
// ---------------------------------------------------------------------------

std::string to_string(ConvexityClass cls) {
  switch (cls) {
    case ConvexityClass::convex: return "convex";
    case ConvexityClass::strictly_convex: return "strictly-convex";
    case ConvexityClass::weakly_convex: return "weakly-convex";
    case ConvexityClass::strongly_convex: return "strongly-convex";
    case ConvexityClass::quasi_convex: return "quasi-convex";
    case ConvexityClass::strongly_quasi_convex: return "strongly-quasi-convex";
    case ConvexityClass::pseudo_convex: return "pseudo-convex";
  }
  return "?";
}

namespace {

ConvexityVerdict check_pseudo_convex(const GeodesicSpace& space, const Objective& f, long samples,
                                     unsigned long long seed, double tolerance) {
  std::mt19937_64 rng(seed);
  ConvexityVerdict verdict;
  verdict.class_checked = ConvexityClass::pseudo_convex;
  verdict.passed = true;

  // Existential search grids for beta and delta.
  std::vector<double> betas;
  for (int e = -6; e <= 2; ++e) betas.push_back(std::pow(10.0, e));
  const double deltas[] = {1.0, 0.5, 0.25, 0.125};
  constexpr int kTGrid = 16;

  for (long s = 0; s < samples; ++s) {
    Point x = space.sample(rng);
    Point y = space.sample(rng);
    double fx = f(x);
    double fy = f(y);
    if (!(fx < kInf) || !(fy < kInf)) continue;
    if (fy < fx) {
      std::swap(x, y);
      std::swap(fx, fy);
    }
    const double scale = 1.0 + std::abs(fx) + std::abs(fy);
    if (!(fy > fx + tolerance * scale)) continue;  // need f(y) > f(x)
    ++verdict.samples;

    bool witnessed = false;
    double best_beta = 0.0, best_delta = 0.0, worst_t = 0.0;
    for (double delta : deltas) {
      // beta must satisfy beta <= (f(y) - f(w_t))/t for every probed t.
      double beta_cap = kInf;
      double argmin_t = 0.0;
      for (int j = 1; j <= kTGrid; ++j) {
        const double t = delta * j / (kTGrid + 1);
        const Point w = space.combine(y, x, t);
        const double cap = (fy - f(w)) / t;
        if (cap < beta_cap) {
          beta_cap = cap;
          argmin_t = t;
        }
      }
      for (auto it = betas.rbegin(); it != betas.rend(); ++it) {
        if (*it <= beta_cap + tolerance * scale) {
          witnessed = true;
          best_beta = *it;
          best_delta = delta;
          break;
        }
      }
      if (witnessed) break;
      if (delta == deltas[std::size(deltas) - 1]) worst_t = argmin_t;
    }
    if (!witnessed) {
      verdict.passed = false;
      verdict.inconclusive = true;
      ConvexityWitness w;
      w.x = x;
      w.y = y;
      w.lhs = fx;
      w.rhs = fy;
      w.beta = betas.front();
      w.delta = deltas[std::size(deltas) - 1];
      w.t = worst_t;
      verdict.witness = w;
      return verdict;
    }
    (void)best_beta;
    (void)best_delta;
  }
  return verdict;
}

}  // namespace

ConvexityVerdict check_convexity_class(const GeodesicSpace& space, const Objective& f,
                                       ConvexityClass cls, double alpha, long samples,
                                       unsigned long long seed, double tolerance) {
  if (samples < 1) throw ArgumentError("check_convexity_class: samples must be >= 1");
  if (cls == ConvexityClass::pseudo_convex) {
    return check_pseudo_convex(space, f, samples, seed, tolerance);
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ConvexityVerdict verdict;
  verdict.class_checked = cls;
  verdict.alpha = alpha;
  verdict.passed = true;
  const bool strict = cls == ConvexityClass::strictly_convex;

  for (long s = 0; s < samples; ++s) {
    const Point x = space.sample(rng);
    const Point y = space.sample(rng);
    const double lambda = unit(rng);
    const double dxy = space.distance(x, y);
    if (strict && (dxy < 1e-8 || lambda < 1e-6 || lambda > 1.0 - 1e-6)) continue;

    const double fx = f(x);
    const double fy = f(y);
    // lambda x (+) (1-lambda) y carries coefficient lambda on x.
    const Point z = space.combine(x, y, 1.0 - lambda);
    const double lhs = f(z);

    double rhs;
    switch (cls) {
      case ConvexityClass::convex:
      case ConvexityClass::strictly_convex:
        rhs = lambda * fx + (1.0 - lambda) * fy;
        break;
      case ConvexityClass::weakly_convex:
        rhs = lambda * fx + (1.0 - lambda) * fy + alpha * lambda * (1.0 - lambda) * dxy * dxy;
        break;
      case ConvexityClass::strongly_convex:
        rhs = lambda * fx + (1.0 - lambda) * fy - alpha * lambda * (1.0 - lambda) * dxy * dxy;
        break;
      case ConvexityClass::quasi_convex:
        rhs = std::max(fx, fy);
        break;
      case ConvexityClass::strongly_quasi_convex:
        rhs = std::max(fx, fy) - alpha * lambda * (1.0 - lambda) * dxy * dxy;
        break;
      default:
        rhs = kInf;
        break;
    }
    ++verdict.samples;
    if (!(rhs < kInf)) continue;  // +inf bound holds trivially

    const double scale = 1.0 + std::abs(fx) + std::abs(fy) + std::abs(alpha) * dxy * dxy;
    const double violation = lhs - rhs;
    // Strictness admits no slack: equality already refutes it.
    const bool bad = strict ? violation >= 0.0 : violation > tolerance * scale;
    if (bad) {
      verdict.max_violation = std::max(verdict.max_violation, violation);
      if (verdict.passed || violation > verdict.witness->lhs - verdict.witness->rhs) {
        ConvexityWitness w;
        w.x = x;
        w.y = y;
        w.lambda = lambda;
        w.lhs = lhs;
        w.rhs = rhs;
        verdict.witness = w;
      }
      verdict.passed = false;
    }
  }
  return verdict;
}

}  // namespace ppa
