#pragma once

#include <bezlane/bezier.hpp>
#include <bezlane/geometry.hpp>

#include <optional>
#include <span>
#include <vector>

namespace bezlane {

inline constexpr double kDedupTolerance = 1e-9;
inline constexpr double kSideTolerance = 1e-12;
inline constexpr double kParallelTolerance = 1e-12;
inline constexpr double kSegmentSlack = 1e-9;
inline constexpr double kDegenerateArea = 1e-12;

/// Vertex loop in counterclockwise polar order about the vertex centroid.
/// Only produced by polar_sort / convex_hull / convex_intersection.
class ConvexPolygon {
 public:
  const std::vector<Point>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Point& operator[](std::size_t i) const { return vertices_[i]; }

 private:
  friend ConvexPolygon polar_sort(std::span<const Point>);
  explicit ConvexPolygon(std::vector<Point> v) : vertices_(std::move(v)) {}
  std::vector<Point> vertices_;
};

/// Line a*x + b*y = c with (a, b) of unit length, remembering the segment it
/// was built from.
struct GeneralLine {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  Point p0;
  Point p1;

  /// Throws std::invalid_argument if p0 == p1.
  static GeneralLine through(Point p0, Point p1);
};

/// Sorts points by atan2 angle about their centroid, starting from the
/// smallest angle (ties by smaller radius). Near-duplicate points are merged.
/// Throws DegeneratePolygonError when fewer than three distinct points remain
/// or they are all collinear.
ConvexPolygon polar_sort(std::span<const Point> points);

/// Monotone-chain hull, returned polar sorted. Collinear boundary points are
/// dropped. Throws DegeneratePolygonError for collinear input.
ConvexPolygon convex_hull(std::span<const Point> points);

/// Triangle-fan area from vertex 0.
double polygon_area(const ConvexPolygon& polygon);

/// Intersection of the two infinite lines, or nullopt when parallel.
std::optional<Point> line_intersection(const GeneralLine& e1, const GeneralLine& e2);

/// Intersection of the two segments the lines were built from.
std::optional<Point> segment_intersection(const GeneralLine& e1, const GeneralLine& e2);

/// Sign of (y - y0)(x1 - x0) - (x - x0)(y1 - y0); magnitudes up to 1e-12
/// count as on the line. Throws std::invalid_argument if p0 == p1.
int point_side(Point p, Point p0, Point p1);

/// Inside-or-on test: the point is never strictly on opposite sides of two
/// edges. `tolerance` widens the on-edge band (absolute, in cross-product units).
bool contains(const ConvexPolygon& polygon, Point p, double tolerance = kSideTolerance);

/// Edge intersections plus mutual insiders, polar sorted; nullopt when the
/// overlap has no area.
std::optional<ConvexPolygon> convex_intersection(const ConvexPolygon& a, const ConvexPolygon& b);

struct IouResult {
  double intersection = 0.0;
  double union_area = 0.0;
  double enclosing = 0.0;
  double iou = 0.0;
  double giou = 0.0;
};

/// IoU and GIoU with the convex hull of both vertex sets as the enclosing
/// object. Throws NumericalDegeneracyError if that hull is near zero area.
IouResult polygon_iou(const ConvexPolygon& a, const ConvexPolygon& b);

inline double giou(const ConvexPolygon& a, const ConvexPolygon& b) { return polygon_iou(a, b).giou; }

/// Convex hull of a curve's control points; the curve lies inside it.
ConvexPolygon control_hull(const BezierCurve& curve);

/// GIoU between the control-point hulls of two curves. Nearly straight curves
/// have near-zero hull area and raise DegeneratePolygonError or
/// NumericalDegeneracyError.
IouResult curve_hull_iou(const BezierCurve& a, const BezierCurve& b);

}  // namespace bezlane
