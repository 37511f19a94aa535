#pragma once

#include <array>
#include <span>
#include <vector>

namespace desctrack {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

double cross(Point2 a, Point2 b);
double distance(Point2 a, Point2 b);
bool is_finite(Point2 p);

/// Convex polygon given as a vertex loop; may be empty.
using Polygon = std::vector<Point2>;

/// Signed shoelace area; positive for counter-clockwise loops in a y-up frame.
double signed_area(std::span<const Point2> poly);
double polygon_area(std::span<const Point2> poly);

/// A convex, non-degenerate quadrilateral.
///
/// Vertices are normalized at construction so that the shoelace sum is
/// positive, i.e. counter-clockwise in the (x, y) frame itself. On a y-down
/// display the same loop appears clockwise. Construction throws DataError for
/// non-finite, zero-area, self-intersecting or non-convex input.
class OrientedBox {
 public:
  explicit OrientedBox(const std::array<Point2, 4>& vertices);

  /// Axis-aligned box spanning [x0,x1] x [y0,y1].
  static OrientedBox axis_aligned(double x0, double y0, double x1, double y1);

  const std::array<Point2, 4>& vertices() const noexcept { return vertices_; }
  const Point2& operator[](std::size_t i) const noexcept { return vertices_[i]; }
  Point2 centroid() const;

  /// Box scaled by `factor` about its centroid.
  OrientedBox inflated(double factor) const;

  friend bool operator==(const OrientedBox&, const OrientedBox&) = default;

 private:
  std::array<Point2, 4> vertices_;
};

/// Boundary-inclusive containment test.
bool point_in_box(Point2 p, const OrientedBox& box);
double box_area(const OrientedBox& box);

/// Intersection of two boxes by successive half-plane clipping.
Polygon intersect_convex(const OrientedBox& a, const OrientedBox& b);

/// Intersection over union, clamped to [0, 1].
double overlap(const OrientedBox& estimate, const OrientedBox& truth);

/// p' = scale * R(rotation) * p + translation
struct SimilarityTransform {
  double scale = 1.0;
  double rotation = 0.0;
  Point2 translation{};

  /// Validates scale > 0 and normalizes rotation into (-pi, pi].
  static SimilarityTransform make(double scale, double rotation, Point2 translation);
  static SimilarityTransform identity() { return {}; }

  SimilarityTransform inverse() const;
  /// (*this) after `first`: x -> this(first(x)).
  SimilarityTransform compose(const SimilarityTransform& first) const;
};

/// Maps an angle into (-pi, pi].
double normalize_angle(double radians);

Point2 apply_transform(const SimilarityTransform& t, Point2 p);
OrientedBox apply_transform(const SimilarityTransform& t, const OrientedBox& box);

}  // namespace desctrack
