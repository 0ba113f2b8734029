#include "ppa/space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ppa {

std::string Point::to_string() const {
  std::ostringstream os;
  if (is_vector()) {
    os << "(";
    const auto& c = coords();
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? ", " : "") << c[i];
    os << ")";
  } else if (is_spider()) {
    const auto& s = spider_coord();
    os << "(leg " << s.leg << ", r=" << s.radius << ")";
  } else {
    os << "[";
    const auto& ps = parts();
    for (std::size_t i = 0; i < ps.size(); ++i) os << (i ? " x " : "") << ps[i].to_string();
    os << "]";
  }
  return os.str();
}

void GeodesicSpace::require_member(const Point& p, const char* what) const {
  if (!contains(p)) {
    throw DomainError(std::string(what) + ": point " + p.to_string() +
                      " is not a member of " + description());
  }
}

double GeodesicSpace::distance(const Point& a, const Point& b) const {
  require_member(a, "distance");
  require_member(b, "distance");
  return do_distance(a, b);
}

Point GeodesicSpace::combine(const Point& x, const Point& y, double t) const {
  require_member(x, "combine");
  require_member(y, "combine");
  if (!(t >= 0.0 && t <= 1.0)) {
    throw ArgumentError("combine: interpolation parameter t=" + std::to_string(t) +
                        " outside [0,1]");
  }
  if (t == 0.0) return x;
  if (t == 1.0) return y;
  return do_combine(x, y, t);
}

std::vector<Direction> GeodesicSpace::probe_directions(const Point& x, int count,
                                                       std::mt19937_64& rng) const {
  require_member(x, "probe_directions");
  if (count < 1) throw ArgumentError("probe_directions: count must be >= 1");
  return do_probe_directions(x, count, rng);
}

double quasi_inner(const GeodesicSpace& space, const Point& a, const Point& b, const Point& c,
                   const Point& d) {
  const double ad = space.distance(a, d);
  const double bc = space.distance(b, c);
  const double ac = space.distance(a, c);
  const double bd = space.distance(b, d);
  return 0.5 * (ad * ad + bc * bc - ac * ac - bd * bd);
}

namespace {

double tail_radius(const GeodesicSpace& space, const Point& c, const std::vector<Point>& seq,
                   std::size_t tail_start, long& evals) {
  double worst = 0.0;
  for (std::size_t n = tail_start; n < seq.size(); ++n) {
    worst = std::max(worst, space.distance(c, seq[n]));
    ++evals;
  }
  return worst;
}

}  // namespace

AsymptoticCenter asymptotic_center(const GeodesicSpace& space, const std::vector<Point>& seq,
                                   std::size_t tail_start, const SearchOptions& search) {
  if (tail_start >= seq.size()) {
    throw ArgumentError("asymptotic_center: empty tail (tail_start=" +
                        std::to_string(tail_start) + ", sequence length " +
                        std::to_string(seq.size()) + ")");
  }
  for (const Point& p : seq) space.require_member(p, "asymptotic_center");

  long evals = 0;

  // Seed with the tail points themselves.
  Point best = seq[tail_start];
  double best_radius = tail_radius(space, best, seq, tail_start, evals);
  for (std::size_t n = tail_start + 1; n < seq.size(); ++n) {
    const double r = tail_radius(space, seq[n], seq, tail_start, evals);
    if (r < best_radius) {
      best = seq[n];
      best_radius = r;
    }
  }

  // Iterated geodesic bisection: pull the incumbent toward tail points and
  // keep any midpoint that shrinks the tail radius.
  static constexpr double kSteps[] = {0.5, 0.25, 0.75};
  for (int round = 0; round < search.rounds && evals < search.max_evaluations; ++round) {
    bool improved = false;
    for (std::size_t n = tail_start; n < seq.size() && evals < search.max_evaluations; ++n) {
      for (double t : kSteps) {
        const Point candidate = space.combine(best, seq[n], t);
        const double r = tail_radius(space, candidate, seq, tail_start, evals);
        if (r < best_radius - search.tolerance) {
          best = candidate;
          best_radius = r;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }

  return AsymptoticCenter{best, best_radius, tail_start};
}

}  // namespace ppa
