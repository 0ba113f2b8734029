#include "ppa/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ppa {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

bool all_finite(const std::vector<double>& a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

std::vector<double> gaussian_unit(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::vector<double> u(dim);
  double n;
  do {
    for (double& v : u) v = gauss(rng);
    n = norm(u);
  } while (n < 1e-12);
  for (double& v : u) v /= n;
  return u;
}

}  // namespace

// ---------------------------------------------------------------------------
// Euclidean space
// ---------------------------------------------------------------------------

EuclideanSpace::EuclideanSpace(int dim) : dim_(dim) {
  if (dim < 1) throw ConfigError("EuclideanSpace: dimension must be >= 1");
}

Point EuclideanSpace::point(std::vector<double> coords) const {
  Point p = Point::vector(std::move(coords));
  require_member(p, "EuclideanSpace::point");
  return p;
}

std::string EuclideanSpace::description() const {
  return "euclidean R^" + std::to_string(dim_);
}

bool EuclideanSpace::contains(const Point& p) const {
  return p.is_vector() && static_cast<int>(p.coords().size()) == dim_ && all_finite(p.coords());
}

Point EuclideanSpace::origin() const { return Point::vector(std::vector<double>(dim_, 0.0)); }

Point EuclideanSpace::sample(std::mt19937_64& rng) const {
  std::normal_distribution<double> gauss;
  std::vector<double> c(dim_);
  for (double& v : c) v = gauss(rng);
  return Point::vector(std::move(c));
}

double EuclideanSpace::do_distance(const Point& a, const Point& b) const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double diff = a.coords()[i] - b.coords()[i];
    s += diff * diff;
  }
  return std::sqrt(s);
}

Point EuclideanSpace::do_combine(const Point& x, const Point& y, double t) const {
  std::vector<double> c(dim_);
  for (int i = 0; i < dim_; ++i) c[i] = x.coords()[i] + t * (y.coords()[i] - x.coords()[i]);
  return Point::vector(std::move(c));
}

std::vector<Direction> EuclideanSpace::do_probe_directions(const Point& x, int count,
                                                           std::mt19937_64& rng) const {
  std::vector<Direction> dirs;
  auto along = [this, x](std::vector<double> u) {
    return Direction{[x, u = std::move(u), this](double r) {
                       std::vector<double> c(dim_);
                       for (int i = 0; i < dim_; ++i) c[i] = x.coords()[i] + r * u[i];
                       return Point::vector(std::move(c));
                     },
                     std::numeric_limits<double>::infinity()};
  };
  if (dim_ == 1) {
    dirs.push_back(along({1.0}));
    dirs.push_back(along({-1.0}));
    return dirs;
  }
  dirs.reserve(count);
  for (int i = 0; i < count; ++i) dirs.push_back(along(gaussian_unit(dim_, rng)));
  return dirs;
}

// ---------------------------------------------------------------------------
// Poincare ball
// ---------------------------------------------------------------------------

namespace {

// Lift of a ball point to the hyperboloid {<X,X> = -1, x0 > 0} in R^{1+n},
// with the Minkowski form <X,Y> = -x0 y0 + x.y .
std::vector<double> lift(const std::vector<double>& p) {
  const double q = 1.0 - dot(p, p);
  std::vector<double> X(p.size() + 1);
  X[0] = (2.0 - q) / q;  // (1+|p|^2)/(1-|p|^2)
  for (std::size_t i = 0; i < p.size(); ++i) X[i + 1] = 2.0 * p[i] / q;
  return X;
}

std::vector<double> unlift(const std::vector<double>& X) {
  std::vector<double> p(X.size() - 1);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = X[i + 1] / (1.0 + X[0]);
  return p;
}

double minkowski(const std::vector<double>& X, const std::vector<double>& Y) {
  double s = -X[0] * Y[0];
  for (std::size_t i = 1; i < X.size(); ++i) s += X[i] * Y[i];
  return s;
}

// cosh d(x,y) - 1, computed without cancellation from ball coordinates.
double cosh_dist_minus_one(const std::vector<double>& x, const std::vector<double>& y) {
  double diff2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    diff2 += d * d;
  }
  return 2.0 * diff2 / ((1.0 - dot(x, x)) * (1.0 - dot(y, y)));
}

}  // namespace

PoincareBall::PoincareBall(int dim, double boundary_margin) : dim_(dim), margin_(boundary_margin) {
  if (dim < 1) throw ConfigError("PoincareBall: dimension must be >= 1");
  if (!(boundary_margin > 0.0 && boundary_margin < 0.5)) {
    throw ConfigError("PoincareBall: boundary margin must lie in (0, 0.5)");
  }
}

Point PoincareBall::point(std::vector<double> coords) const {
  Point p = Point::vector(std::move(coords));
  require_member(p, "PoincareBall::point");
  return p;
}

std::string PoincareBall::description() const {
  return "poincare ball H^" + std::to_string(dim_);
}

bool PoincareBall::contains(const Point& p) const {
  return p.is_vector() && static_cast<int>(p.coords().size()) == dim_ && all_finite(p.coords()) &&
         norm(p.coords()) <= 1.0 - margin_;
}

Point PoincareBall::origin() const { return Point::vector(std::vector<double>(dim_, 0.0)); }

Point PoincareBall::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> radius(0.0, 0.9);
  const std::vector<double> u = gaussian_unit(dim_, rng);
  const double r = radius(rng);
  std::vector<double> c(dim_);
  for (int i = 0; i < dim_; ++i) c[i] = r * u[i];
  return Point::vector(std::move(c));
}

double PoincareBall::do_distance(const Point& a, const Point& b) const {
  const double u = cosh_dist_minus_one(a.coords(), b.coords());
  // acosh(1+u) without loss of precision for small u.
  return std::log1p(u + std::sqrt(u * (u + 2.0)));
}

Point PoincareBall::do_combine(const Point& x, const Point& y, double t) const {
  const double u = cosh_dist_minus_one(x.coords(), y.coords());
  if (u == 0.0) return x;
  const double d = std::log1p(u + std::sqrt(u * (u + 2.0)));
  const std::vector<double> X = lift(x.coords());
  const std::vector<double> Y = lift(y.coords());
  const double sinh_d = std::sqrt(u * (u + 2.0));
  // Unit tangent at X toward Y; gamma(s) = cosh(s) X + sinh(s) U.
  const double s = t * d;
  const double cs = std::cosh(s), ss = std::sinh(s);
  std::vector<double> G(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double tangent = (Y[i] - (1.0 + u) * X[i]) / sinh_d;
    G[i] = cs * X[i] + ss * tangent;
  }
  std::vector<double> p = unlift(G);
  const double limit = 1.0 - margin_;
  const double n = norm(p);
  if (n > limit) {  // rounding nudge back inside the representable ball
    for (double& v : p) v *= limit / n;
  }
  return Point::vector(std::move(p));
}

std::vector<std::vector<double>> PoincareBall::tangent_frame(const Point& c) const {
  require_member(c, "tangent_frame");
  const std::vector<double> X = lift(c.coords());
  std::vector<std::vector<double>> frame;
  frame.reserve(dim_);
  for (int i = 1; i <= dim_ && static_cast<int>(frame.size()) < dim_; ++i) {
    std::vector<double> v(dim_ + 1, 0.0);
    v[i] = 1.0;
    // Project onto the tangent space at X, then Minkowski-Gram-Schmidt
    // against the frame built so far.
    const double vx = minkowski(v, X);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += vx * X[k];
    for (const auto& b : frame) {
      const double vb = minkowski(v, b);
      for (std::size_t k = 0; k < v.size(); ++k) v[k] -= vb * b[k];
    }
    const double n2 = minkowski(v, v);
    if (n2 < 1e-20) continue;
    const double n = std::sqrt(n2);
    for (double& vk : v) vk /= n;
    frame.push_back(std::move(v));
  }
  return frame;
}

Point PoincareBall::exp_map(const Point& c, const std::vector<std::vector<double>>& frame,
                            const std::vector<double>& u, double r) const {
  if (r == 0.0) return c;
  const std::vector<double> X = lift(c.coords());
  const double cr = std::cosh(r), sr = std::sinh(r);
  std::vector<double> G(X.size());
  for (std::size_t k = 0; k < G.size(); ++k) {
    double tangent = 0.0;
    for (std::size_t i = 0; i < frame.size(); ++i) tangent += u[i] * frame[i][k];
    G[k] = cr * X[k] + sr * tangent;
  }
  std::vector<double> p = unlift(G);
  const double limit = 1.0 - margin_;
  const double n = norm(p);
  if (n > limit) {
    for (double& v : p) v *= limit / n;
  }
  return Point::vector(std::move(p));
}

std::vector<Direction> PoincareBall::do_probe_directions(const Point& x, int count,
                                                         std::mt19937_64& rng) const {
  const std::vector<double> X = lift(x.coords());
  // Hyperbolic reach before the membership sphere: points past it are clamped.
  const double to_boundary = std::log((2.0 - margin_) / margin_) - scale(x);
  const double max_r = std::max(to_boundary, 1e-3);

  auto along = [this, X](std::vector<double> tangent, double max_radius) {
    return Direction{[X, u = std::move(tangent), this](double r) {
                       const double cr = std::cosh(r), sr = std::sinh(r);
                       std::vector<double> G(X.size());
                       for (std::size_t i = 0; i < X.size(); ++i) G[i] = cr * X[i] + sr * u[i];
                       std::vector<double> p = unlift(G);
                       const double limit = 1.0 - margin_;
                       const double n = norm(p);
                       if (n > limit) {
                         for (double& v : p) v *= limit / n;
                       }
                       return Point::vector(std::move(p));
                     },
                     max_radius};
  };

  auto unit_tangent = [&X](std::vector<double> v) {
    // Minkowski projection onto the tangent space at X, then normalize.
    const double vx = minkowski(v, X);
    for (std::size_t i = 0; i < X.size(); ++i) v[i] += vx * X[i];
    const double n = std::sqrt(minkowski(v, v));
    for (double& c : v) c /= n;
    return v;
  };

  std::vector<Direction> dirs;
  if (dim_ == 1) {
    for (double sign : {1.0, -1.0}) {
      std::vector<double> v(2, 0.0);
      v[1] = sign;
      dirs.push_back(along(unit_tangent(std::move(v)), max_r));
    }
    return dirs;
  }
  std::normal_distribution<double> gauss;
  dirs.reserve(count);
  for (int k = 0; k < count; ++k) {
    std::vector<double> v(dim_ + 1);
    double tangential;
    do {
      for (double& c : v) c = gauss(rng);
      const double vx = minkowski(v, X);
      std::vector<double> w = v;
      for (std::size_t i = 0; i < w.size(); ++i) w[i] += vx * X[i];
      tangential = minkowski(w, w);
    } while (tangential < 1e-12);
    dirs.push_back(along(unit_tangent(std::move(v)), max_r));
  }
  return dirs;
}

// ---------------------------------------------------------------------------
// Spider (k-pod R-tree)
// ---------------------------------------------------------------------------

SpiderSpace::SpiderSpace(int legs) : legs_(legs) {
  if (legs < 2) throw ConfigError("SpiderSpace: need at least 2 legs");
}

Point SpiderSpace::point(int leg, double radius) const {
  Point p = Point::spider(leg, radius);
  require_member(p, "SpiderSpace::point");
  return p;
}

std::string SpiderSpace::description() const {
  return "spider with " + std::to_string(legs_) + " legs";
}

bool SpiderSpace::contains(const Point& p) const {
  if (!p.is_spider()) return false;
  const SpiderCoord& c = p.spider_coord();
  return c.leg >= 0 && c.leg < legs_ && c.radius >= 0.0 && std::isfinite(c.radius);
}

Point SpiderSpace::origin() const { return Point::spider(0, 0.0); }

Point SpiderSpace::sample(std::mt19937_64& rng) const {
  std::uniform_int_distribution<int> leg(0, legs_ - 1);
  std::uniform_real_distribution<double> radius(0.0, 10.0);
  return Point::spider(leg(rng), radius(rng));
}

double SpiderSpace::do_distance(const Point& a, const Point& b) const {
  const SpiderCoord& p = a.spider_coord();
  const SpiderCoord& q = b.spider_coord();
  if (p.leg == q.leg || p.radius == 0.0 || q.radius == 0.0) return std::abs(p.radius - q.radius);
  return p.radius + q.radius;
}

Point SpiderSpace::do_combine(const Point& x, const Point& y, double t) const {
  const SpiderCoord& p = x.spider_coord();
  const SpiderCoord& q = y.spider_coord();
  if (p.leg == q.leg || q.radius == 0.0) {
    return Point::spider(p.leg, p.radius + t * (q.radius - p.radius));
  }
  if (p.radius == 0.0) return Point::spider(q.leg, t * q.radius);
  // Distinct legs: travel toward the branch point, possibly past it.
  const double moved = t * (p.radius + q.radius);
  if (moved < p.radius) return Point::spider(p.leg, p.radius - moved);
  if (moved == p.radius) return Point::spider(p.leg, 0.0);
  return Point::spider(q.leg, moved - p.radius);
}

std::vector<Direction> SpiderSpace::do_probe_directions(const Point& x, int /*count*/,
                                                        std::mt19937_64& /*rng*/) const {
  const SpiderCoord c = x.spider_coord();
  std::vector<Direction> dirs;
  dirs.reserve(legs_);
  // Outward along the current leg.
  dirs.push_back(Direction{[c](double r) { return Point::spider(c.leg, c.radius + r); },
                           std::numeric_limits<double>::infinity()});
  // Toward the branch point and onward onto each other leg.
  for (int j = 0; j < legs_; ++j) {
    if (j == c.leg) continue;
    dirs.push_back(Direction{[c, j](double r) {
                               if (r <= c.radius) return Point::spider(c.leg, c.radius - r);
                               return Point::spider(j, r - c.radius);
                             },
                             std::numeric_limits<double>::infinity()});
  }
  return dirs;
}

// ---------------------------------------------------------------------------
// Product space
// ---------------------------------------------------------------------------

ProductSpace::ProductSpace(std::vector<std::shared_ptr<const GeodesicSpace>> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw ConfigError("ProductSpace: needs at least one component");
  for (const auto& c : components_) {
    if (!c) throw ConfigError("ProductSpace: null component");
  }
}

Point ProductSpace::point(std::vector<Point> parts) const {
  Point p = Point::product(std::move(parts));
  require_member(p, "ProductSpace::point");
  return p;
}

std::string ProductSpace::description() const {
  std::ostringstream os;
  os << "product [";
  for (std::size_t i = 0; i < components_.size(); ++i) {
    os << (i ? ", " : "") << components_[i]->description();
  }
  os << "]";
  return os.str();
}

bool ProductSpace::contains(const Point& p) const {
  if (!p.is_product() || p.parts().size() != components_.size()) return false;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (!components_[i]->contains(p.parts()[i])) return false;
  }
  return true;
}

Point ProductSpace::origin() const {
  std::vector<Point> parts;
  parts.reserve(components_.size());
  for (const auto& c : components_) parts.push_back(c->origin());
  return Point::product(std::move(parts));
}

Point ProductSpace::sample(std::mt19937_64& rng) const {
  std::vector<Point> parts;
  parts.reserve(components_.size());
  for (const auto& c : components_) parts.push_back(c->sample(rng));
  return Point::product(std::move(parts));
}

double ProductSpace::conformance_tolerance() const {
  double tol = 0.0;
  for (const auto& c : components_) tol = std::max(tol, c->conformance_tolerance());
  return tol;
}

double ProductSpace::default_resolvent_gap() const {
  double gap = 0.0;
  for (const auto& c : components_) gap = std::max(gap, c->default_resolvent_gap());
  return gap;
}

double ProductSpace::do_distance(const Point& a, const Point& b) const {
  double s = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const double d = components_[i]->distance(a.parts()[i], b.parts()[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

Point ProductSpace::do_combine(const Point& x, const Point& y, double t) const {
  std::vector<Point> parts;
  parts.reserve(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    parts.push_back(components_[i]->combine(x.parts()[i], y.parts()[i], t));
  }
  return Point::product(std::move(parts));
}

std::vector<Direction> ProductSpace::do_probe_directions(const Point& x, int count,
                                                         std::mt19937_64& rng) const {
  const std::size_t arity = components_.size();
  std::normal_distribution<double> gauss;
  std::vector<Direction> dirs;
  dirs.reserve(count);

  auto component_direction = [&](std::size_t i) {
    auto cd = components_[i]->probe_directions(x.parts()[i], 1, rng);
    std::uniform_int_distribution<std::size_t> pick(0, cd.size() - 1);
    return cd[pick(rng)];
  };

  for (int k = 0; k < count; ++k) {
    // First `arity` directions move a single component; the rest are mixes
    // with random nonnegative weights on the l2 sphere.
    std::vector<double> w(arity, 0.0);
    if (static_cast<std::size_t>(k) < arity) {
      w[k] = 1.0;
    } else {
      double n = 0.0;
      for (double& v : w) {
        v = std::abs(gauss(rng));
        n += v * v;
      }
      n = std::sqrt(n);
      if (n < 1e-12) {
        w.assign(arity, 0.0);
        w[0] = 1.0;
      } else {
        for (double& v : w) v /= n;
      }
    }
    std::vector<Direction> comp(arity);
    double max_r = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < arity; ++i) {
      comp[i] = component_direction(i);
      if (w[i] > 0.0) max_r = std::min(max_r, comp[i].max_radius / w[i]);
    }
    auto base = x.parts();
    dirs.push_back(Direction{[base, comp = std::move(comp), w = std::move(w)](double r) {
                               std::vector<Point> parts = base;
                               for (std::size_t i = 0; i < parts.size(); ++i) {
                                 if (w[i] > 0.0) parts[i] = comp[i].at(r * w[i]);
                               }
                               return Point::product(std::move(parts));
                             },
                             max_r});
  }
  return dirs;
}

// ---------------------------------------------------------------------------
// SpaceSpec / make_space
// ---------------------------------------------------------------------------

SpaceSpec SpaceSpec::euclidean(int dim) {
  SpaceSpec s;
  s.kind = Kind::euclidean;
  s.dim = dim;
  return s;
}

SpaceSpec SpaceSpec::poincare_ball(int dim, double margin) {
  SpaceSpec s;
  s.kind = Kind::poincare_ball;
  s.dim = dim;
  s.boundary_margin = margin;
  return s;
}

SpaceSpec SpaceSpec::spider(int legs) {
  SpaceSpec s;
  s.kind = Kind::spider;
  s.legs = legs;
  return s;
}

SpaceSpec SpaceSpec::product(std::vector<SpaceSpec> components) {
  SpaceSpec s;
  s.kind = Kind::product;
  s.components = std::move(components);
  return s;
}

std::shared_ptr<const GeodesicSpace> make_space(const SpaceSpec& spec) {
  switch (spec.kind) {
    case SpaceSpec::Kind::euclidean:
      return std::make_shared<EuclideanSpace>(spec.dim);
    case SpaceSpec::Kind::poincare_ball:
      return std::make_shared<PoincareBall>(spec.dim, spec.boundary_margin);
    case SpaceSpec::Kind::spider:
      return std::make_shared<SpiderSpace>(spec.legs);
    case SpaceSpec::Kind::product: {
      if (spec.components.empty()) {
        throw ConfigError("make_space: product needs at least one component");
      }
      std::vector<std::shared_ptr<const GeodesicSpace>> parts;
      parts.reserve(spec.components.size());
      for (const auto& c : spec.components) parts.push_back(make_space(c));
      return std::make_shared<ProductSpace>(std::move(parts));
    }
  }
  throw ConfigError("make_space: unknown space kind");
}

// ---------------------------------------------------------------------------
// Conformance report
// ---------------------------------------------------------------------------

double ConformanceReport::max_violation() const {
  double worst = 0.0;
  for (const auto& c : checks) worst = std::max(worst, c.max_violation);
  return worst;
}

ConformanceReport conformance_report(const GeodesicSpace& space, long samples,
                                     unsigned long long seed) {
  if (samples < 1) throw ArgumentError("conformance_report: samples must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ConformanceCheck symmetry{"metric symmetry", 0.0, samples};
  ConformanceCheck identity{"metric identity", 0.0, samples};
  ConformanceCheck triangle{"triangle inequality", 0.0, samples};
  ConformanceCheck geodesic{"geodesic property", 0.0, samples};
  ConformanceCheck cauchy{"cauchy-schwarz", 0.0, samples};
  ConformanceCheck convex{"1-strong convexity of d^2", 0.0, samples};

  auto bump = [](ConformanceCheck& c, double violation) {
    c.max_violation = std::max(c.max_violation, violation);
  };

  for (long s = 0; s < samples; ++s) {
    const Point a = space.sample(rng);
    const Point b = space.sample(rng);
    const Point c = space.sample(rng);
    const Point d = space.sample(rng);
    const double t = unit(rng);

    const double ab = space.distance(a, b);
    const double ba = space.distance(b, a);
    const double ac = space.distance(a, c);
    const double bc = space.distance(b, c);
    const double cd = space.distance(c, d);

    bump(symmetry, std::abs(ab - ba) / (1.0 + ab));
    bump(identity, space.distance(a, a));
    bump(triangle, (ac - (ab + bc)) / (1.0 + ac));

    const Point m = space.combine(a, b, t);
    const double am = space.distance(a, m);
    const double bm = space.distance(b, m);
    bump(geodesic,
         std::max(std::abs(am - t * ab), std::abs(bm - (1.0 - t) * ab)) / (1.0 + ab));

    const double qi = quasi_inner(space, a, b, c, d);
    bump(cauchy, (qi - ab * cd) / (1.0 + ab * cd));

    const double mc = space.distance(m, c);
    const double lhs = mc * mc;
    const double rhs = (1.0 - t) * ac * ac + t * bc * bc - t * (1.0 - t) * ab * ab;
    bump(convex, (lhs - rhs) / (1.0 + ac * ac + bc * bc + ab * ab));
  }

  ConformanceReport report;
  report.checks = {symmetry, identity, triangle, geodesic, cauchy, convex};
  report.tolerance = space.conformance_tolerance();
  report.seed = seed;
  return report;
}

}  // namespace ppa
