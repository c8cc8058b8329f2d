#include <bezlane/errors.hpp>
#include <bezlane/polygon.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bezlane {

namespace {

std::vector<Point> dedup(std::span<const Point> points) {
  std::vector<Point> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    const bool seen = std::any_of(out.begin(), out.end(), [&](const Point& q) {
      return std::abs(p.x - q.x) <= kDedupTolerance && std::abs(p.y - q.y) <= kDedupTolerance;
    });
    if (!seen) out.push_back(p);
  }
  return out;
}

bool all_collinear(const std::vector<Point>& pts) {
  // Largest triangle spanned with the first point and the farthest point.
  const Point origin = pts.front();
  std::size_t far = 0;
  double far_d = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double d = distance(pts[i], origin);
    if (d > far_d) {
      far_d = d;
      far = i;
    }
  }
  if (far_d <= kDedupTolerance) return true;
  const Point axis = pts[far] - origin;
  for (const auto& p : pts) {
    // Distance from the axis line, not the raw cross product, so the check
    // does not scale with coordinate magnitude.
    if (std::abs(cross(axis, p - origin)) / far_d > kDedupTolerance) return false;
  }
  return true;
}

bool on_segment(Point p, const GeneralLine& e) {
  return p.x >= std::min(e.p0.x, e.p1.x) - kSegmentSlack && p.x <= std::max(e.p0.x, e.p1.x) + kSegmentSlack &&
         p.y >= std::min(e.p0.y, e.p1.y) - kSegmentSlack && p.y <= std::max(e.p0.y, e.p1.y) + kSegmentSlack;
}

double side_value(Point p, Point p0, Point p1) {
  return (p.y - p0.y) * (p1.x - p0.x) - (p.x - p0.x) * (p1.y - p0.y);
}

}  // namespace

GeneralLine GeneralLine::through(Point p0, Point p1) {
  if (p0 == p1) throw std::invalid_argument("line through two identical points");
  double a = p1.y - p0.y;
  double b = p0.x - p1.x;
  const double len = std::hypot(a, b);
  a /= len;
  b /= len;
  return {a, b, a * p0.x + b * p0.y, p0, p1};
}

ConvexPolygon polar_sort(std::span<const Point> points) {
  auto pts = dedup(points);
  if (pts.size() < 3) {
    throw DegeneratePolygonError(fmt::format("polygon needs 3 distinct points, got {}", pts.size()));
  }
  if (all_collinear(pts)) throw DegeneratePolygonError("polygon vertices are collinear");

  Point c;
  for (const auto& p : pts) c = c + p;
  c = (1.0 / static_cast<double>(pts.size())) * c;

  struct Keyed {
    double angle;
    double radius;
    Point p;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(pts.size());
  for (const auto& p : pts) keyed.push_back({std::atan2(p.y - c.y, p.x - c.x), distance(p, c), p});
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& l, const Keyed& r) {
    return l.angle != r.angle ? l.angle < r.angle : l.radius < r.radius;
  });
  std::vector<Point> out;
  out.reserve(keyed.size());
  for (const auto& k : keyed) out.push_back(k.p);
  return ConvexPolygon(std::move(out));
}

ConvexPolygon convex_hull(std::span<const Point> points) {
  auto pts = dedup(points);
  if (pts.size() < 3) {
    throw DegeneratePolygonError(fmt::format("hull needs 3 distinct points, got {}", pts.size()));
  }
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) throw DegeneratePolygonError("hull input is collinear");
  return polar_sort(hull);
}

double polygon_area(const ConvexPolygon& polygon) {
  const auto& v = polygon.vertices();
  double area = 0.0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const Point& p1 = v[0];
    const Point& p2 = v[i];
    const Point& p3 = v[i + 1];
    area += 0.5 * std::abs(p1.x * (p2.y - p3.y) + p2.x * (p3.y - p1.y) + p3.x * (p1.y - p2.y));
  }
  return area;
}

std::optional<Point> line_intersection(const GeneralLine& e1, const GeneralLine& e2) {
  const double det = e1.a * e2.b - e2.a * e1.b;
  if (std::abs(det) <= kParallelTolerance) return std::nullopt;
  return Point{(e2.b * e1.c - e1.b * e2.c) / det, (e1.a * e2.c - e2.a * e1.c) / det};
}

std::optional<Point> segment_intersection(const GeneralLine& e1, const GeneralLine& e2) {
  auto p = line_intersection(e1, e2);
  if (p && on_segment(*p, e1) && on_segment(*p, e2)) return p;
  return std::nullopt;
}

int point_side(Point p, Point p0, Point p1) {
  if (p0 == p1) throw std::invalid_argument("point_side on a degenerate segment");
  const double v = side_value(p, p0, p1);
  if (std::abs(v) <= kSideTolerance) return 0;
  return v > 0.0 ? 1 : -1;
}

bool contains(const ConvexPolygon& polygon, Point p, double tolerance) {
  const auto& v = polygon.vertices();
  bool pos = false;
  bool neg = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double s = side_value(p, v[i], v[(i + 1) % v.size()]);
    if (s > tolerance) pos = true;
    if (s < -tolerance) neg = true;
    if (pos && neg) return false;
  }
  return true;
}

std::optional<ConvexPolygon> convex_intersection(const ConvexPolygon& a, const ConvexPolygon& b) {
  std::vector<Point> candidates;
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  for (std::size_t i = 0; i < va.size(); ++i) {
    const auto ea = GeneralLine::through(va[i], va[(i + 1) % va.size()]);
    for (std::size_t j = 0; j < vb.size(); ++j) {
      const auto eb = GeneralLine::through(vb[j], vb[(j + 1) % vb.size()]);
      if (auto p = segment_intersection(ea, eb)) candidates.push_back(*p);
    }
  }
  for (const auto& p : va) {
    if (contains(b, p)) candidates.push_back(p);
  }
  for (const auto& p : vb) {
    if (contains(a, p)) candidates.push_back(p);
  }
  try {
    return polar_sort(candidates);
  } catch (const DegeneratePolygonError&) {
    // Empty, a single touching point, or a shared edge: no area.
    return std::nullopt;
  }
}

IouResult polygon_iou(const ConvexPolygon& a, const ConvexPolygon& b) {
  std::vector<Point> all(a.vertices());
  all.insert(all.end(), b.vertices().begin(), b.vertices().end());
  const double enclosing = polygon_area(convex_hull(all));
  if (enclosing <= kDegenerateArea) {
    throw NumericalDegeneracyError(fmt::format("enclosing hull area {} is too small for GIoU", enclosing));
  }
  const double area_a = polygon_area(a);
  const double area_b = polygon_area(b);
  const auto inter_poly = convex_intersection(a, b);
  const double inter = inter_poly ? polygon_area(*inter_poly) : 0.0;
  const double uni = area_a + area_b - inter;
  IouResult r;
  r.intersection = inter;
  r.union_area = uni;
  r.enclosing = enclosing;
  r.iou = uni > 0.0 ? inter / uni : 0.0;
  r.giou = r.iou - (enclosing - uni) / enclosing;
  return r;
}

ConvexPolygon control_hull(const BezierCurve& curve) { return convex_hull(curve.control_points()); }

IouResult curve_hull_iou(const BezierCurve& a, const BezierCurve& b) {
  return polygon_iou(control_hull(a), control_hull(b));
}

}  // namespace bezlane
