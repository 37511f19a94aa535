#include "desctrack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "desctrack/errors.hpp"

namespace desctrack {

double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

double signed_area(std::span<const Point2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * sum;
}

double polygon_area(std::span<const Point2> poly) { return std::abs(signed_area(poly)); }

namespace {

// Relative tolerance for degeneracy checks, scaled by the quad's extent.
constexpr double kDegenerateRel = 1e-12;

std::array<Point2, 4> normalize_quad(std::array<Point2, 4> v) {
  for (const auto& p : v) {
    if (!is_finite(p)) throw DataError("box vertex is not finite");
  }
  double extent = 0.0;
  for (const auto& p : v) {
    for (const auto& q : v) extent = std::max(extent, distance(p, q));
  }
  if (extent == 0.0) throw DataError("degenerate box: all vertices coincide");

  // Order by angle about the vertex mean, keeping the first input vertex first.
  Point2 c{};
  for (const auto& p : v) c = c + p;
  c = 0.25 * c;
  const Point2 first = v[0];
  std::stable_sort(v.begin(), v.end(), [c](Point2 a, Point2 b) {
    return std::atan2(a.y - c.y, a.x - c.x) < std::atan2(b.y - c.y, b.x - c.x);
  });
  std::rotate(v.begin(), std::find(v.begin(), v.end(), first), v.end());

  const double area = signed_area(v);
  if (area <= kDegenerateRel * extent * extent) {
    throw DataError("degenerate box: zero area");
  }

  // Every turn must be a strict left turn for a convex, simple quad.
  const double eps = kDegenerateRel * extent * extent;
  for (std::size_t i = 0; i < 4; ++i) {
    const Point2 e0 = v[(i + 1) % 4] - v[i];
    const Point2 e1 = v[(i + 2) % 4] - v[(i + 1) % 4];
    if (cross(e0, e1) <= eps) throw DataError("box is not convex or self-intersects");
  }
  return v;
}

}  // namespace

OrientedBox::OrientedBox(const std::array<Point2, 4>& vertices)
    : vertices_(normalize_quad(vertices)) {}

OrientedBox OrientedBox::axis_aligned(double x0, double y0, double x1, double y1) {
  return OrientedBox({Point2{x0, y0}, Point2{x1, y0}, Point2{x1, y1}, Point2{x0, y1}});
}

Point2 OrientedBox::centroid() const {
  Point2 c{};
  for (const auto& p : vertices_) c = c + p;
  return 0.25 * c;
}

OrientedBox OrientedBox::inflated(double factor) const {
  const Point2 c = centroid();
  std::array<Point2, 4> v{};
  for (std::size_t i = 0; i < 4; ++i) v[i] = c + factor * (vertices_[i] - c);
  return OrientedBox(v);
}

bool point_in_box(Point2 p, const OrientedBox& box) {
  for (std::size_t i = 0; i < 4; ++i) {
    const Point2& a = box[i];
    const Point2& b = box[(i + 1) % 4];
    if (cross(b - a, p - a) < 0.0) return false;
  }
  return true;
}

double box_area(const OrientedBox& box) { return signed_area(box.vertices()); }

namespace {

// Keeps the part of `poly` on the left of the directed line a->b.
Polygon clip_half_plane(const Polygon& poly, Point2 a, Point2 b) {
  Polygon out;
  const std::size_t n = poly.size();
  if (n == 0) return out;
  out.reserve(n + 1);
  const Point2 dir = b - a;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& cur = poly[i];
    const Point2& nxt = poly[(i + 1) % n];
    const double sc = cross(dir, cur - a);
    const double sn = cross(dir, nxt - a);
    if (sc >= 0.0) out.push_back(cur);
    if ((sc >= 0.0) != (sn >= 0.0)) {
      const double t = sc / (sc - sn);
      out.push_back(cur + t * (nxt - cur));
    }
  }
  return out;
}

}  // namespace

Polygon intersect_convex(const OrientedBox& a, const OrientedBox& b) {
  Polygon poly(a.vertices().begin(), a.vertices().end());
  for (std::size_t i = 0; i < 4 && !poly.empty(); ++i) {
    poly = clip_half_plane(poly, b[i], b[(i + 1) % 4]);
  }
  if (poly.size() < 3 || polygon_area(poly) == 0.0) poly.clear();
  return poly;
}

double overlap(const OrientedBox& estimate, const OrientedBox& truth) {
  if (estimate == truth) return 1.0;
  const double inter = polygon_area(intersect_convex(estimate, truth));
  if (inter <= 0.0) return 0.0;
  const double uni = box_area(estimate) + box_area(truth) - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double normalize_angle(double radians) {
  constexpr double pi = std::numbers::pi;
  double r = std::remainder(radians, 2.0 * pi);  // [-pi, pi]
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

SimilarityTransform SimilarityTransform::make(double scale, double rotation, Point2 translation) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("similarity scale must be positive and finite");
  }
  if (!std::isfinite(rotation) || !is_finite(translation)) {
    throw std::invalid_argument("similarity parameters must be finite");
  }
  return {scale, normalize_angle(rotation), translation};
}

SimilarityTransform SimilarityTransform::inverse() const {
  const double inv_scale = 1.0 / scale;
  const double c = std::cos(-rotation);
  const double s = std::sin(-rotation);
  const Point2 t{-inv_scale * (c * translation.x - s * translation.y),
                 -inv_scale * (s * translation.x + c * translation.y)};
  return {inv_scale, normalize_angle(-rotation), t};
}

SimilarityTransform SimilarityTransform::compose(const SimilarityTransform& first) const {
  return {scale * first.scale, normalize_angle(rotation + first.rotation),
          apply_transform(*this, first.translation)};
}

Point2 apply_transform(const SimilarityTransform& t, Point2 p) {
  const double c = std::cos(t.rotation);
  const double s = std::sin(t.rotation);
  return {t.scale * (c * p.x - s * p.y) + t.translation.x,
          t.scale * (s * p.x + c * p.y) + t.translation.y};
}

OrientedBox apply_transform(const SimilarityTransform& t, const OrientedBox& box) {
  std::array<Point2, 4> v{};
  for (std::size_t i = 0; i < 4; ++i) v[i] = apply_transform(t, box[i]);
  return OrientedBox(v);
}

}  // namespace desctrack
