#include <bezlane/errors.hpp>
#include <bezlane/polygon.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace bezlane;

namespace {

ConvexPolygon square(double x, double y, double side = 1.0) {
  const std::vector<Point> p{{x, y}, {x + side, y}, {x + side, y + side}, {x, y + side}};
  return polar_sort(p);
}

double angle_about(Point p, Point c) { return std::atan2(p.y - c.y, p.x - c.x); }

Point centroid(const std::vector<Point>& v) {
  Point c{};
  for (const auto& p : v) c = c + p;
  return (1.0 / v.size()) * c;
}

}  // namespace

TEST(PolarSort, ScrambledSquare) {
  const std::vector<Point> pts{{1, 1}, {0, 0}, {0, 1}, {1, 0}};
  const auto poly = polar_sort(pts);
  ASSERT_EQ(poly.size(), 4u);
  // Smallest atan2 angle about (0.5, 0.5) is the (0,0) corner at -3pi/4.
  EXPECT_EQ(poly[0], (Point{0, 0}));
  EXPECT_EQ(poly[1], (Point{1, 0}));
  EXPECT_EQ(poly[2], (Point{1, 1}));
  EXPECT_EQ(poly[3], (Point{0, 1}));
  EXPECT_DOUBLE_EQ(polygon_area(poly), 1.0);
}

TEST(PolarSort, SortedTriangleIsCyclicallyUnchanged) {
  const std::vector<Point> tri{{0, 0}, {1, 0}, {0, 1}};
  const auto poly = polar_sort(tri);
  ASSERT_EQ(poly.size(), 3u);
  std::size_t start = 0;
  while (!(poly[start] == tri[0])) ++start;
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(poly[(start + i) % 3], tri[i]);
  const auto again = polar_sort(poly.vertices());
  EXPECT_EQ(again.vertices(), poly.vertices());
}

TEST(PolarSort, CirclePointsFollowAngle) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  for (int k = 0; k < 50; ++k) {
    std::vector<Point> pts;
    for (int i = 0; i < 20; ++i) {
      const double a = u(rng);
      pts.push_back({0.5 + 0.3 * std::cos(a), 0.5 + 0.3 * std::sin(a)});
    }
    const auto poly = polar_sort(pts);
    ASSERT_EQ(poly.size(), 20u);
    const Point c = centroid(pts);
    for (std::size_t i = 1; i < poly.size(); ++i)
      EXPECT_LT(angle_about(poly[i - 1], c), angle_about(poly[i], c));
    // The centroid differs from the circle center, but the cyclic order of
    // points on a circle is the same about any interior point.
    std::vector<Point> by_center = pts;
    std::sort(by_center.begin(), by_center.end(),
              [](Point a, Point b) { return angle_about(a, {0.5, 0.5}) < angle_about(b, {0.5, 0.5}); });
    std::size_t off = 0;
    while (!(by_center[off] == poly[0])) ++off;
    for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(poly[i], by_center[(off + i) % 20]);
  }
}

TEST(PolarSort, RemovesDuplicates) {
  const std::vector<Point> pts{{0, 0}, {1, 0}, {0, 1}, {1e-12, 0}, {1, 0}};
  EXPECT_EQ(polar_sort(pts).size(), 3u);
}

TEST(PolarSort, CollinearIsDegenerate) {
  const std::vector<Point> pts{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  EXPECT_THROW(polar_sort(pts), DegeneratePolygonError);
  const std::vector<Point> two{{0, 0}, {1, 1}};
  EXPECT_THROW(polar_sort(two), DegeneratePolygonError);
}

TEST(ConvexHull, InteriorPointExcluded) {
  const std::vector<Point> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  const auto hull = convex_hull(pts);
  EXPECT_EQ(hull.size(), 4u);
  EXPECT_DOUBLE_EQ(polygon_area(hull), 1.0);
}

TEST(ConvexHull, ConvexPositionRetained) {
  std::vector<Point> pts;
  for (int i = 0; i < 7; ++i) pts.push_back({std::cos(i * 2 * M_PI / 7), std::sin(i * 2 * M_PI / 7)});
  EXPECT_EQ(convex_hull(pts).size(), 7u);
}

TEST(ConvexHull, MatchesBruteForce) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    std::vector<Point> pts(100);
    for (auto& p : pts) p = {u(rng), u(rng)};
    const auto hull = convex_hull(pts);
    auto expected = oracle::brute_force_hull(pts);
    auto got = hull.vertices();
    auto less = [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); };
    std::sort(expected.begin(), expected.end(), less);
    std::sort(got.begin(), got.end(), less);
    EXPECT_EQ(got, expected);
    // Hull containment: each input point is inside or on every hull edge.
    for (const auto& p : pts) {
      for (std::size_t i = 0; i < hull.size(); ++i)
        EXPECT_GE(point_side(p, hull[i], hull[(i + 1) % hull.size()]) * 1, 0)
            << "point outside hull edge";
    }
  }
}

TEST(ConvexHull, CollinearIsDegenerate) {
  const std::vector<Point> pts{{0, 0}, {0.5, 0.5}, {1, 1}};
  EXPECT_THROW(convex_hull(pts), DegeneratePolygonError);
}

TEST(Area, Basics) {
  EXPECT_DOUBLE_EQ(polygon_area(square(0, 0)), 1.0);
  const std::vector<Point> tri{{0, 0}, {1, 0}, {0, 1}};
  EXPECT_DOUBLE_EQ(polygon_area(polar_sort(tri)), 0.5);
  std::vector<Point> hex;
  for (int i = 0; i < 6; ++i) hex.push_back({std::cos(i * M_PI / 3), std::sin(i * M_PI / 3)});
  EXPECT_NEAR(polygon_area(polar_sort(hex)), 3.0 * std::sqrt(3.0) / 2.0, 1e-9);
}

TEST(Area, PositiveForRandomPolygons) {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 500; ++k) EXPECT_GT(polygon_area(polar_sort(oracle::random_convex(rng, 0, 1))), 0.0);
}

TEST(Lines, Intersections) {
  const auto x_axis = GeneralLine::through({0, 0}, {1, 0});
  const auto y_axis = GeneralLine::through({0, 0}, {0, 1});
  const auto p = line_intersection(x_axis, y_axis);
  ASSERT_TRUE(p);
  EXPECT_NEAR(p->x, 0.0, 1e-15);
  EXPECT_NEAR(p->y, 0.0, 1e-15);

  EXPECT_FALSE(line_intersection(x_axis, GeneralLine::through({0, 1}, {1, 1})));

  const auto d1 = GeneralLine::through({0, 0}, {2, 2});
  const auto d2 = GeneralLine::through({0, 2}, {2, 0});
  const auto q = segment_intersection(d1, d2);
  ASSERT_TRUE(q);
  EXPECT_NEAR(q->x, 1.0, 1e-12);
  EXPECT_NEAR(q->y, 1.0, 1e-12);
}

TEST(Lines, NormalizedCoefficients) {
  const auto l = GeneralLine::through({1, 2}, {4, 6});
  EXPECT_NEAR(std::hypot(l.a, l.b), 1.0, 1e-15);
  EXPECT_NEAR(l.a * 1 + l.b * 2, l.c, 1e-12);
  EXPECT_NEAR(l.a * 4 + l.b * 6, l.c, 1e-12);
  EXPECT_THROW(GeneralLine::through({1, 1}, {1, 1}), std::invalid_argument);
}

TEST(Lines, SegmentBounds) {
  const auto a = GeneralLine::through({0, 0}, {1, 0});
  EXPECT_FALSE(segment_intersection(a, GeneralLine::through({2, -1}, {2, 1})));
  // Touching at an endpoint counts.
  const auto touch = segment_intersection(a, GeneralLine::through({1, 0}, {1, 1}));
  ASSERT_TRUE(touch);
  EXPECT_NEAR(touch->x, 1.0, 1e-12);
}

TEST(PointSide, Signs) {
  EXPECT_EQ(point_side({0, 1}, {0, 0}, {1, 0}), 1);
  EXPECT_EQ(point_side({0.5, 0}, {0, 0}, {1, 0}), 0);
  EXPECT_EQ(point_side({0, -1}, {0, 0}, {1, 0}), -1);
  EXPECT_EQ(point_side({0.5, 1e-13}, {0, 0}, {1, 0}), 0);
  EXPECT_THROW(point_side({0, 0}, {1, 1}, {1, 1}), std::invalid_argument);
}

TEST(Intersection, SameSquare) {
  const auto a = square(0, 0);
  const auto i = convex_intersection(a, a);
  ASSERT_TRUE(i);
  EXPECT_NEAR(polygon_area(*i), 1.0, 1e-12);
}

TEST(Intersection, Disjoint) { EXPECT_FALSE(convex_intersection(square(0, 0), square(3, 0))); }

TEST(Intersection, OffsetSquares) {
  const auto i = convex_intersection(square(0, 0), square(0.5, 0.5));
  ASSERT_TRUE(i);
  EXPECT_NEAR(polygon_area(*i), 0.25, 1e-12);
  const auto r = oracle::raster_areas(square(0, 0).vertices(), square(0.5, 0.5).vertices(), {}, -0.25, 1.75);
  EXPECT_NEAR(r.inter, 0.25, 1e-2);
}

TEST(Intersection, ContainedPolygon) {
  const auto i = convex_intersection(square(0, 0, 4), square(1, 1));
  ASSERT_TRUE(i);
  EXPECT_NEAR(polygon_area(*i), 1.0, 1e-12);
}

TEST(Giou, HandFixtures) {
  const auto a = square(0, 0);
  const auto same = polygon_iou(a, a);
  EXPECT_NEAR(same.iou, 1.0, 1e-9);
  EXPECT_NEAR(same.giou, 1.0, 1e-9);

  const auto touching = polygon_iou(a, square(1, 0));
  EXPECT_NEAR(touching.iou, 0.0, 1e-9);
  EXPECT_NEAR(touching.enclosing, 2.0, 1e-9);
  EXPECT_NEAR(touching.union_area, 2.0, 1e-9);
  EXPECT_NEAR(touching.giou, 0.0, 1e-9);

  const auto gap = polygon_iou(a, square(2, 0));
  EXPECT_NEAR(gap.enclosing, 3.0, 1e-9);
  EXPECT_NEAR(gap.giou, -1.0 / 3.0, 1e-9);
  EXPECT_NEAR(giou(a, square(2, 0)), -1.0 / 3.0, 1e-9);
}

TEST(Giou, GapRasterOracle) {
  const auto a = square(0, 0);
  const auto b = square(2, 0);
  const auto hull_pts = std::vector<Point>{{0, 0}, {3, 0}, {3, 1}, {0, 1}};
  const auto r = oracle::raster_areas(a.vertices(), b.vertices(), hull_pts, 0.0, 3.0);
  const double uni = r.a + r.b - r.inter;
  EXPECT_NEAR(r.inter / uni - (r.hull - uni) / r.hull, -1.0 / 3.0, 1e-2);
}

TEST(Giou, SymmetryBoundsAndRasterOracle) {
  std::mt19937_64 rng(24);
  for (int k = 0; k < 60; ++k) {
    const auto va = oracle::random_convex(rng, 0, 1);
    const auto vb = oracle::random_convex(rng, 0, 1);
    const auto a = polar_sort(va);
    const auto b = polar_sort(vb);
    const auto ab = polygon_iou(a, b);
    const auto ba = polygon_iou(b, a);
    EXPECT_NEAR(ab.giou, ba.giou, 1e-12);
    EXPECT_NEAR(ab.iou, ba.iou, 1e-12);
    EXPECT_GT(ab.giou, -1.0);
    EXPECT_LE(ab.giou, 1.0 + 1e-12);
    EXPECT_LE(ab.giou, ab.iou + 1e-12);
    std::vector<Point> all = va;
    all.insert(all.end(), vb.begin(), vb.end());
    const auto r = oracle::raster_areas(a.vertices(), b.vertices(), convex_hull(all).vertices(), 0, 1, 512);
    const double uni = r.a + r.b - r.inter;
    EXPECT_NEAR(ab.intersection, r.inter, 1e-2);
    EXPECT_NEAR(ab.iou, r.inter / uni, 1e-2);
    EXPECT_NEAR(ab.giou, r.inter / uni - (r.hull - uni) / r.hull, 1e-2);
  }
}

TEST(Giou, EqualsIouWhenUnionFillsHull) {
  // Two rectangles overlapping into a larger rectangle.
  const auto a = polar_sort(std::vector<Point>{{0, 0}, {2, 0}, {2, 1}, {0, 1}});
  const auto b = polar_sort(std::vector<Point>{{1, 0}, {3, 0}, {3, 1}, {1, 1}});
  const auto r = polygon_iou(a, b);
  EXPECT_NEAR(r.iou, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.giou, r.iou, 1e-12);
}

TEST(Giou, CurveHulls) {
  const BezierCurve c({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  const auto r = curve_hull_iou(c, c);
  EXPECT_NEAR(r.giou, 1.0, 1e-12);
  EXPECT_NEAR(polygon_area(control_hull(c)), 1.0, 1e-12);
  // A straight curve has a degenerate hull.
  const BezierCurve line({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  EXPECT_THROW(curve_hull_iou(line, line), DegeneratePolygonError);
}

TEST(Giou, NearDegenerateHullRaises) {
  // Thin slivers: valid polygons whose enclosing hull area is below 1e-12.
  const auto a = polar_sort(std::vector<Point>{{0, 0}, {1e-5, 0}, {0.5e-5, 1e-8}});
  const auto b = polar_sort(std::vector<Point>{{0, 0}, {1e-5, 0}, {0.5e-5, -1e-8}});
  EXPECT_THROW(polygon_iou(a, b), NumericalDegeneracyError);
}
