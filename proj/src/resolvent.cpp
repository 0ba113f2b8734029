#include "ppa/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ppa/spaces.hpp"

namespace ppa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double validated_lambda_bound(const Objective& f, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw StepSizeError("resolve: lambda must be positive and finite");
  }
  const double alpha = f.weak_convexity_alpha.value_or(0.0);
  if (alpha > 0.0 && lambda >= 0.5 / alpha) {
    throw StepSizeError("resolve: lambda=" + std::to_string(lambda) +
                        " violates lambda < 1/(2*alpha) with alpha=" + std::to_string(alpha));
  }
  return alpha;
}

bool has_closed_form(const GeodesicSpace& space, const Objective& f) {
  if (!f.form) return false;
  const bool supported_space = dynamic_cast<const EuclideanSpace*>(&space) != nullptr ||
                               dynamic_cast<const SpiderSpace*>(&space) != nullptr;
  if (!supported_space) return false;
  return f.form->kind == ObjectiveSpec::Kind::squared_distance ||
         f.form->kind == ObjectiveSpec::Kind::distance;
}

// Both registered forms reduce to a 1-D problem along the geodesic [x, p]:
// the sublevel geometry of d(., p) and of d^2(x, .) both improve under the
// projection onto that segment.
ResolventResult closed_form_resolve(const GeodesicSpace& space, const Objective& f, double lambda,
                                    const Point& x) {
  const Point& p = f.form->target;
  const double c = f.form->coefficient;
  const double d = space.distance(x, p);
  Point j = x;
  if (d > 0.0) {
    double s;  // arclength from x toward p
    if (f.form->kind == ObjectiveSpec::Kind::squared_distance) {
      s = 2.0 * lambda * c * d / (2.0 * lambda * c + 1.0);
    } else {
      s = std::min(lambda * c, d);
    }
    j = (s >= d) ? p : space.combine(x, p, s / d);
  }
  const double fj = f(j);
  const double dj = space.distance(x, j);
  return ResolventResult{j, fj, fj + dj * dj / (2.0 * lambda), 0, 0.0, true};
}

double golden_section(const std::function<double(double)>& phi, int iterations) {
  const double inv_gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  double c = b - inv_gr * (b - a);
  double d = a + inv_gr * (b - a);
  double fc = phi(c), fd = phi(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_gr * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_gr * (b - a);
      fd = phi(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

ResolventResult resolve(const GeodesicSpace& space, const Objective& f, double lambda,
                        const Point& x, const ResolveOptions& opts, std::mt19937_64& rng) {
  space.require_member(x, "resolve");
  const double alpha = validated_lambda_bound(f, lambda);

  if (has_closed_form(space, f)) return closed_form_resolve(space, f, lambda, x);

  const double mu = 0.5 / lambda - alpha;  // strong convexity of the inner function
  const double gap_abs = opts.certified_gap.value_or(space.default_resolvent_gap());

  long evals = 0;
  auto g = [&](const Point& y) {
    ++evals;
    const double fy = f(y);
    if (!(fy < kInf)) return kInf;
    const double d = space.distance(x, y);
    return fy + d * d / (2.0 * lambda);
  };

  Point y = opts.start.value_or(x);
  double gy = g(y);
  {
    // x itself is always feasible for the minimization; start at the better.
    const double gx = opts.start ? g(x) : gy;
    if (gx < gy) {
      y = x;
      gy = gx;
    }
  }
  if (!(gy < kInf)) {
    throw DomainError("resolve: no starting point inside the domain of " + f.description);
  }

  const double base_scale = 1.0 + space.scale(x);
  const double r0 = 0.1 * base_scale;
  const double r_floor = 1e-12 * base_scale;
  double r = r0;
  double certified = kInf;  // upper bound on g(y) - g*; moves only improve g

  while (evals < opts.max_evaluations && r > r_floor) {
    const double dxy = space.distance(x, y);
    const double gap_target =
        std::min(gap_abs, std::max(opts.relative_gap * (dxy + r) * (dxy + r), 1e-26));

    const auto dirs = space.probe_directions(y, opts.directions, rng);
    double best_ratio = 0.0;
    int best = -1;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      const Point z = dirs[i].at(std::min(r, dirs[i].max_radius));
      const double dyz = space.distance(y, z);
      if (!(dyz > 0.0)) continue;
      const double ratio = (gy - g(z)) / dyz;
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best = static_cast<int>(i);
      }
    }

    if (best < 0) {
      // No descent at radius r in any probed direction: the minimizer sits
      // within ~r, so g(y) - g* <= mu (2r)^2 by strong convexity.
      certified = std::min(certified, 4.0 * mu * r * r);
      if (certified <= gap_target) break;
      r *= 0.25;
      continue;
    }

    // Residual certificate at this radius (descent rate + discretization).
    certified = std::min(certified, (best_ratio + mu * r) * (best_ratio + mu * r) / (2.0 * mu));
    if (certified <= gap_target) break;

    // Line-search toward an anchor past the expected minimizer distance
    // d(y, y*) <= best_ratio / mu derived from the strong-convexity bound.
    const double anchor_dist = std::min(std::max(best_ratio / mu, 2.0 * r), dirs[best].max_radius);
    const Point anchor = dirs[best].at(anchor_dist);
    const double t_star = golden_section(
        [&](double t) { return g(space.combine(y, anchor, t)); }, opts.golden_iterations);
    const Point y_next = space.combine(y, anchor, t_star);
    const double gy_next = g(y_next);
    if (gy_next < gy) {
      y = y_next;
      gy = gy_next;
      r = std::min(2.0 * r, r0);
    } else {
      r *= 0.25;
    }
  }

  ResolventResult result{y, f(y), gy, evals, certified, false};
  if (!(certified <= gap_abs)) {
    throw ConvergenceError("resolve: evaluation budget exhausted at certified gap " +
                               std::to_string(certified) + " > " + std::to_string(gap_abs),
                           result);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

namespace {

struct GridState {
  Point best;
  double value = kInf;
  long evaluations = 0;
  long budget = 0;

  void offer(const Point& p, double v) {
    ++evaluations;
    if (evaluations > budget) throw CapabilityError("oracle_resolve: evaluation budget exceeded");
    if (v < value) {
      value = v;
      best = p;
    }
  }
};

double auto_radius(const GeodesicSpace& space, const Objective& f, double lambda, const Point& x,
                   double step) {
  // d^2(x, J)/(2 lambda) <= f(x) - f(J) <= f(x) - inf f, with inf f probed
  // over samples, the known minimizer, and x itself.
  std::mt19937_64 rng(0x5eedULL);
  double inf_est = f(x);
  if (f.known_minimizer) inf_est = std::min(inf_est, f(*f.known_minimizer));
  for (int i = 0; i < 128; ++i) inf_est = std::min(inf_est, f(space.sample(rng)));
  const double drop = std::max(f(x) - inf_est, 0.0);
  return 2.0 * std::sqrt(2.0 * lambda * drop) + std::max(100.0 * step, 1e-3);
}

}  // namespace

OracleResult oracle_resolve(const GeodesicSpace& space, const Objective& f, double lambda,
                            const Point& x, const GridSpec& grid) {
  space.require_member(x, "oracle_resolve");
  validated_lambda_bound(f, lambda);
  if (!(grid.step > 0.0)) throw ArgumentError("oracle_resolve: grid step must be positive");

  auto g = [&](const Point& y) {
    const double fy = f(y);
    if (!(fy < kInf)) return kInf;
    const double d = space.distance(x, y);
    return fy + d * d / (2.0 * lambda);
  };

  const double radius =
      grid.radius > 0.0 ? grid.radius : auto_radius(space, f, lambda, x, grid.step);

  GridState state;
  state.best = x;
  state.value = g(x);
  state.evaluations = 1;
  state.budget = grid.max_evaluations;

  if (const auto* spider = dynamic_cast<const SpiderSpace*>(&space)) {
    // Radial grids over the metric ball of the current window around the
    // incumbent; shrink the window until the pitch reaches the target.
    double window = radius;
    while (true) {
      const double h = std::max(window / 4000, grid.step / 2.0);
      const SpiderCoord c = state.best.spider_coord();
      for (int leg = 0; leg < spider->legs(); ++leg) {
        double lo, hi;
        if (leg == c.leg) {
          lo = std::max(0.0, c.radius - window);
          hi = c.radius + window;
        } else {
          if (window <= c.radius) continue;
          lo = 0.0;
          hi = window - c.radius;
        }
        for (double rr = lo; rr <= hi + 0.5 * h; rr += h) {
          const Point p = Point::spider(leg, std::max(rr, 0.0));
          state.offer(p, g(p));
        }
      }
      if (h <= grid.step / 2.0 + 1e-300) {
        return OracleResult{state.best, state.value, h, state.evaluations};
      }
      window = 20.0 * h;
    }
  }

  const auto* euclid = dynamic_cast<const EuclideanSpace*>(&space);
  const auto* ball = dynamic_cast<const PoincareBall*>(&space);
  if (!euclid && !ball) {
    throw CapabilityError("oracle_resolve: unsupported space " + space.description() +
                          " (supported: euclidean/poincare dim <= 2, spider)");
  }
  const int dim = euclid ? euclid->dim() : ball->dim();
  if (dim > 2) {
    throw CapabilityError("oracle_resolve: dimension " + std::to_string(dim) +
                          " exceeds the oracle's limit of 2");
  }

  // Exhaustive Cartesian passes (tangent grids through the exponential map
  // on the ball) with shrinking windows. On the 2-D ball, wide windows are
  // covered by a polar pass first: its mesh is honest in the metric, while
  // tangent grids would stretch by ~cosh(window).
  const double final_h = grid.step / (dim == 1 ? 2.0 : 3.0);
  double window = radius;
  while (true) {
    Point center = state.best;
    double h;
    if (ball && dim == 2 && window > 0.8) {
      const double area = 2.0 * 3.14159265358979323846 * (std::cosh(window) - 1.0);
      h = std::max(std::sqrt(area / 300000.0), final_h);
      const auto frame = ball->tangent_frame(center);
      state.offer(center, g(center));
      for (double rho = h; rho <= window + 0.5 * h; rho += h) {
        const long n_theta = std::max<long>(8, std::lround(std::ceil(
                                                   2.0 * 3.14159265358979323846 * std::sinh(rho) / h)));
        for (long k = 0; k < n_theta; ++k) {
          const double theta = 2.0 * 3.14159265358979323846 * k / n_theta;
          const Point p = ball->exp_map(center, frame, {std::cos(theta), std::sin(theta)}, rho);
          state.offer(p, g(p));
        }
      }
    } else {
      const long per_axis = dim == 1 ? 8000 : 150;
      h = std::max(window / per_axis, final_h);
      const int half = static_cast<int>(std::ceil(window / h));
      std::vector<std::vector<double>> frame;
      if (ball) frame = ball->tangent_frame(center);
      std::vector<int> idx(dim, -half);
      while (true) {
        Point p = center;
        if (euclid) {
          std::vector<double> c = center.coords();
          for (int i = 0; i < dim; ++i) c[i] += idx[i] * h;
          p = Point::vector(std::move(c));
        } else {
          double norm2 = 0.0;
          for (int i = 0; i < dim; ++i) norm2 += static_cast<double>(idx[i]) * idx[i];
          const double rr = h * std::sqrt(norm2);
          if (rr > 0.0) {
            std::vector<double> u(dim);
            for (int i = 0; i < dim; ++i) u[i] = idx[i] * h / rr;
            p = ball->exp_map(center, frame, u, rr);
          }
        }
        if (space.contains(p)) state.offer(p, g(p));
        int i = 0;
        for (; i < dim; ++i) {
          if (++idx[i] <= half) break;
          idx[i] = -half;
        }
        if (i == dim) break;
      }
    }

    if (h <= final_h + 1e-300) {
      return OracleResult{state.best, state.value, h, state.evaluations};
    }
    window = std::min(24.0 * h, 0.7 * window);
  }
}

// ---------------------------------------------------------------------------
// Projection property
// ---------------------------------------------------------------------------

ProjectionReport check_projection_property(const GeodesicSpace& space, const Objective& f,
                                           double lambda, const Point& x,
                                           const ResolventResult& result, long samples,
                                           unsigned long long seed, double tolerance) {
  (void)lambda;
  std::mt19937_64 rng(seed);
  const Point& j = result.point;
  const double fj = f(j);
  const double djx = space.distance(j, x);

  ProjectionReport report;
  report.threshold = tolerance * (1.0 + djx);
  report.max_quasi_inner = -kInf;

  std::vector<Point> inside;  // seeds for boundary bisection
  if (f.known_minimizer && f(*f.known_minimizer) <= fj) inside.push_back(*f.known_minimizer);
  inside.push_back(j);  // z = J itself is always feasible (degenerate vector)

  auto accept = [&](const Point& z) {
    report.max_quasi_inner = std::max(report.max_quasi_inner, quasi_inner(space, j, z, j, x));
    ++report.accepted_samples;
  };

  accept(j);
  for (long s = 0; s < samples; ++s) {
    const Point q = space.sample(rng);
    const double fq = f(q);
    if (fq <= fj) {
      accept(q);
      inside.push_back(q);
      continue;
    }
    // Bisect from a feasible seed toward q for a near-boundary member of
    // the sublevel set, where the projection inequality is tight.
    const Point& seed_pt = inside[s % inside.size()];
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 50; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (f(space.combine(seed_pt, q, mid)) <= fj) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    accept(space.combine(seed_pt, q, lo));
  }

  report.inconclusive = report.accepted_samples == 0;
  report.passed = !report.inconclusive && report.max_quasi_inner <= report.threshold;
  return report;
}

}  // namespace ppa
