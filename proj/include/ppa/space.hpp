#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ppa/errors.hpp"
#include "ppa/point.hpp"

namespace ppa {

/// A geodesic ray direction anchored at a point: `at(r)` is the point at
/// metric distance r from the anchor along the ray, valid for r in
/// [0, max_radius].
struct Direction {
  std::function<Point(double)> at;
  double max_radius = std::numeric_limits<double>::infinity();
};

/// Abstract geodesic space with unique geodesics (a CAT(0) model space).
///
/// Implementations provide the metric, the geodesic combination
/// (1-t)x (+) ty, a sampling distribution for property checks, and probe
/// directions used by derivative-free estimators. All operations validate
/// membership of their point arguments and throw DomainError otherwise.
class GeodesicSpace {
 public:
  virtual ~GeodesicSpace() = default;

  virtual std::string description() const = 0;
  virtual bool contains(const Point& p) const = 0;

  /// Metric distance. Symmetric, nonnegative, zero iff the points coincide.
  double distance(const Point& a, const Point& b) const;

  /// The unique point z = (1-t)x (+) ty with d(x,z) = t*d(x,y) and
  /// d(y,z) = (1-t)*d(x,y). Returns the inputs bit-exactly at t = 0 and
  /// t = 1. Throws ArgumentError for t outside [0,1].
  Point combine(const Point& x, const Point& y, double t) const;

  /// Canonical base point (coordinate origin / branch point).
  virtual Point origin() const = 0;

  /// Draw a point from the space's sampling distribution (used by the
  /// conformance and convexity checkers).
  virtual Point sample(std::mt19937_64& rng) const = 0;

  /// Geodesic ray directions at x for probing: `count` is a hint; spaces
  /// with a canonical finite direction set (the spider) ignore it.
  std::vector<Direction> probe_directions(const Point& x, int count, std::mt19937_64& rng) const;

  /// Distance from the origin; used to pick probe scales.
  double scale(const Point& x) const { return distance(origin(), x); }

  /// Relative tolerance at which this space passes the conformance checks.
  virtual double conformance_tolerance() const = 0;

  /// Default certified-gap target for resolvent solves on this space.
  virtual double default_resolvent_gap() const = 0;

  void require_member(const Point& p, const char* what) const;

 private:
  virtual double do_distance(const Point& a, const Point& b) const = 0;
  virtual Point do_combine(const Point& x, const Point& y, double t) const = 0;
  virtual std::vector<Direction> do_probe_directions(const Point& x, int count,
                                                     std::mt19937_64& rng) const = 0;
};

/// The point (1-t)x (+) ty; see GeodesicSpace::combine.
inline Point geodesic_point(const GeodesicSpace& space, const Point& x, const Point& y, double t) {
  return space.combine(x, y, t);
}

/// Quasi-linearization pairing of the vectors ab and cd:
///   <ab, cd> = (d^2(a,d) + d^2(b,c) - d^2(a,c) - d^2(b,d)) / 2.
/// Satisfies symmetry in the two vectors, sign flip under reversal, and
/// additivity <ax,cd> + <xb,cd> = <ab,cd>; in CAT(0) spaces it also
/// satisfies the Cauchy-Schwarz inequality <ab,cd> <= d(a,b)d(c,d).
double quasi_inner(const GeodesicSpace& space, const Point& a, const Point& b, const Point& c,
                   const Point& d);

struct SearchOptions {
  int rounds = 40;             // improvement rounds over the candidate set
  long max_evaluations = 200000;  // budget in distance evaluations
  double tolerance = 1e-12;    // minimum improvement counted as progress
};

/// Approximate asymptotic center of the tail {x_n : n >= tail_start}:
/// center minimizes the finite-tail surrogate max_n d(center, x_n) of the
/// limsup radius; radius is the attained value. The search is coordinate
/// free (iterated geodesic bisection between candidates and tail points),
/// so it never claims more than "no evaluated candidate does better".
struct AsymptoticCenter {
  Point center;
  double radius = 0.0;
  std::size_t tail_start = 0;
};

AsymptoticCenter asymptotic_center(const GeodesicSpace& space, const std::vector<Point>& seq,
                                   std::size_t tail_start, const SearchOptions& search = {});

}  // namespace ppa
