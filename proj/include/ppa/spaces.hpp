#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ppa/space.hpp"

namespace ppa {

/// Flat R^n with the l2 metric; geodesics are straight segments.
class EuclideanSpace : public GeodesicSpace {
 public:
  explicit EuclideanSpace(int dim);

  int dim() const { return dim_; }
  Point point(std::vector<double> coords) const;

  std::string description() const override;
  bool contains(const Point& p) const override;
  Point origin() const override;
  Point sample(std::mt19937_64& rng) const override;
  double conformance_tolerance() const override { return 1e-9; }
  double default_resolvent_gap() const override { return 1e-10; }

 private:
  double do_distance(const Point& a, const Point& b) const override;
  Point do_combine(const Point& x, const Point& y, double t) const override;
  std::vector<Direction> do_probe_directions(const Point& x, int count,
                                             std::mt19937_64& rng) const override;
  int dim_;
};

/// Poincare ball model of hyperbolic n-space. Points are coordinate vectors
/// of Euclidean norm <= 1 - boundary_margin; distances blow up toward the
/// boundary. Geodesic evaluation goes through the hyperboloid model (lift,
/// combine, project back), which is exact and avoids Mobius arithmetic.
class PoincareBall : public GeodesicSpace {
 public:
  explicit PoincareBall(int dim, double boundary_margin = 1e-9);

  int dim() const { return dim_; }
  double boundary_margin() const { return margin_; }
  Point point(std::vector<double> coords) const;

  /// Orthonormal tangent frame at c (dim vectors on the lifted hyperboloid).
  std::vector<std::vector<double>> tangent_frame(const Point& c) const;
  /// Point at metric distance r from c along the unit tangent sum_i u_i e_i
  /// of the given frame. Exact (radial isometry of the exponential map).
  Point exp_map(const Point& c, const std::vector<std::vector<double>>& frame,
                const std::vector<double>& u, double r) const;

  std::string description() const override;
  bool contains(const Point& p) const override;
  Point origin() const override;
  Point sample(std::mt19937_64& rng) const override;
  double conformance_tolerance() const override { return 1e-6; }
  double default_resolvent_gap() const override { return 1e-6; }

 private:
  double do_distance(const Point& a, const Point& b) const override;
  Point do_combine(const Point& x, const Point& y, double t) const override;
  std::vector<Direction> do_probe_directions(const Point& x, int count,
                                             std::mt19937_64& rng) const override;
  int dim_;
  double margin_;
};

/// k half-lines (legs) glued at one branch point: the simplest R-tree.
/// d((i,r),(i,s)) = |r-s| on one leg; d((i,r),(j,s)) = r+s across legs.
class SpiderSpace : public GeodesicSpace {
 public:
  explicit SpiderSpace(int legs);

  int legs() const { return legs_; }
  Point point(int leg, double radius) const;

  std::string description() const override;
  bool contains(const Point& p) const override;
  Point origin() const override;
  Point sample(std::mt19937_64& rng) const override;
  double conformance_tolerance() const override { return 1e-9; }
  double default_resolvent_gap() const override { return 1e-8; }

 private:
  double do_distance(const Point& a, const Point& b) const override;
  Point do_combine(const Point& x, const Point& y, double t) const override;
  std::vector<Direction> do_probe_directions(const Point& x, int count,
                                             std::mt19937_64& rng) const override;
  int legs_;
};

/// l2 product of CAT(0) spaces: d^2 = sum of component d^2, geodesics are
/// componentwise with a shared interpolation parameter.
class ProductSpace : public GeodesicSpace {
 public:
  explicit ProductSpace(std::vector<std::shared_ptr<const GeodesicSpace>> components);

  std::size_t arity() const { return components_.size(); }
  const GeodesicSpace& component(std::size_t i) const { return *components_[i]; }
  Point point(std::vector<Point> parts) const;

  std::string description() const override;
  bool contains(const Point& p) const override;
  Point origin() const override;
  Point sample(std::mt19937_64& rng) const override;
  double conformance_tolerance() const override;
  double default_resolvent_gap() const override;

 private:
  double do_distance(const Point& a, const Point& b) const override;
  Point do_combine(const Point& x, const Point& y, double t) const override;
  std::vector<Direction> do_probe_directions(const Point& x, int count,
                                             std::mt19937_64& rng) const override;
  std::vector<std::shared_ptr<const GeodesicSpace>> components_;
};

/// Declarative space description (part of the experiment config schema).
struct SpaceSpec {
  enum class Kind { euclidean, poincare_ball, spider, product };
  Kind kind = Kind::euclidean;
  int dim = 1;                       // euclidean / poincare_ball
  int legs = 3;                      // spider
  double boundary_margin = 1e-9;     // poincare_ball
  std::vector<SpaceSpec> components; // product

  static SpaceSpec euclidean(int dim);
  static SpaceSpec poincare_ball(int dim, double margin = 1e-9);
  static SpaceSpec spider(int legs);
  static SpaceSpec product(std::vector<SpaceSpec> components);
};

/// Build a space from its spec. Throws ConfigError on malformed specs.
std::shared_ptr<const GeodesicSpace> make_space(const SpaceSpec& spec);

/// One sampled-check category of the conformance report.
struct ConformanceCheck {
  std::string name;
  double max_violation = 0.0;  // relative; <= tolerance means pass
  long samples = 0;
};

/// Empirical CAT(0) conformance: metric axioms, the geodesic property,
/// Cauchy-Schwarz for the quasi-linearization, and 1-strong convexity of
/// d^2(x,.) along geodesics, all on `samples` random tuples.
struct ConformanceReport {
  std::vector<ConformanceCheck> checks;
  double tolerance = 0.0;
  unsigned long long seed = 0;

  double max_violation() const;
  bool passed() const { return max_violation() <= tolerance; }
};

ConformanceReport conformance_report(const GeodesicSpace& space, long samples,
                                     unsigned long long seed);

}  // namespace ppa
