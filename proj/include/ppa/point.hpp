#pragma once

#include <string>
#include <variant>
#include <vector>

namespace ppa {

/// Coordinates of a point on a spider (k half-lines glued at a branch point):
/// a leg index and the distance from the branch point along that leg.
struct SpiderCoord {
  int leg = 0;
  double radius = 0.0;
};

/// At the branch point (radius 0) the leg index is only a representative and
/// does not participate in equality.
inline bool operator==(const SpiderCoord& a, const SpiderCoord& b) {
  if (a.radius == 0.0 && b.radius == 0.0) return true;
  return a.leg == b.leg && a.radius == b.radius;
}

/// Immutable point of a geodesic space.
///
/// The payload is space-specific: a coordinate vector (Euclidean space and
/// the Poincare ball), a SpiderCoord, or a tuple of component points for
/// product spaces. Membership in a particular space is validated by that
/// space, not by the point itself.
class Point {
 public:
  Point() = default;

  static Point vector(std::vector<double> coords) {
    Point p;
    p.payload_ = std::move(coords);
    return p;
  }
  static Point spider(int leg, double radius) {
    Point p;
    p.payload_ = SpiderCoord{leg, radius};
    return p;
  }
  static Point product(std::vector<Point> parts) {
    Point p;
    p.payload_ = std::move(parts);
    return p;
  }

  bool is_vector() const { return std::holds_alternative<std::vector<double>>(payload_); }
  bool is_spider() const { return std::holds_alternative<SpiderCoord>(payload_); }
  bool is_product() const { return std::holds_alternative<std::vector<Point>>(payload_); }

  const std::vector<double>& coords() const { return std::get<std::vector<double>>(payload_); }
  const SpiderCoord& spider_coord() const { return std::get<SpiderCoord>(payload_); }
  const std::vector<Point>& parts() const { return std::get<std::vector<Point>>(payload_); }

  friend bool operator==(const Point& a, const Point& b) { return a.payload_ == b.payload_; }
  friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }

  std::string to_string() const;

 private:
  std::variant<std::vector<double>, SpiderCoord, std::vector<Point>> payload_;
};

}  // namespace ppa
