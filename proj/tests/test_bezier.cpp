#include <bezlane/bezier.hpp>
#include <bezlane/errors.hpp>
#include <bezlane/polygon.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace bezlane;

namespace {

BezierCurve arch() { return BezierCurve({{0, 0}, {0, 1}, {1, 1}, {1, 0}}); }

void expect_near(Point a, Point b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
}

}  // namespace

TEST(BezierCurve, RejectsTooFewOrNonFinitePoints) {
  EXPECT_THROW(BezierCurve({{0, 0}}), std::invalid_argument);
  EXPECT_THROW(BezierCurve({{0, 0}, {NAN, 1}}), std::invalid_argument);
  EXPECT_THROW(BezierCurve({{0, 0}, {INFINITY, 1}}), std::invalid_argument);
  EXPECT_EQ(BezierCurve({{0, 0}, {1, 1}}).order(), 1);
}

TEST(Bernstein, Endpoints) {
  EXPECT_EQ(bernstein_basis(3, 0.0), (std::vector<double>{1, 0, 0, 0}));
  EXPECT_EQ(bernstein_basis(3, 1.0), (std::vector<double>{0, 0, 0, 1}));
}

TEST(Bernstein, Midpoint) {
  const auto w = bernstein_basis(3, 0.5);
  const std::vector<double> expected{0.125, 0.375, 0.375, 0.125};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(w[i], expected[i], 1e-15);
}

TEST(Bernstein, DomainErrors) {
  EXPECT_THROW(bernstein_basis(3, -1e-9), std::domain_error);
  EXPECT_THROW(bernstein_basis(3, 1.0 + 1e-9), std::domain_error);
  EXPECT_THROW(bernstein_basis(3, NAN), std::domain_error);
  EXPECT_THROW(bernstein_basis(0, 0.5), std::invalid_argument);
}

TEST(Bernstein, PartitionOfUnityAndClosedForm) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 1; n <= 5; ++n) {
    for (int k = 0; k < 1000; ++k) {
      const double t = u(rng);
      const auto w = bernstein_basis(n, t);
      ASSERT_EQ(w.size(), static_cast<std::size_t>(n + 1));
      double sum = 0.0;
      for (int i = 0; i <= n; ++i) {
        EXPECT_NEAR(w[i], oracle::bernstein(n, i, t), 1e-14);
        sum += w[i];
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(SampleGrid, EndpointsOnly) {
  const auto g = build_sample_grid(3, 2);
  ASSERT_EQ(g.basis().rows(), 2);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(g.basis()(0, i), i == 0 ? 1.0 : 0.0);
    EXPECT_EQ(g.basis()(1, i), i == 3 ? 1.0 : 0.0);
  }
}

TEST(SampleGrid, DefaultGridRowsSumToOne) {
  const auto g = build_sample_grid(3);
  EXPECT_EQ(g.size(), 100u);
  EXPECT_EQ(g.basis().rows(), 100);
  EXPECT_EQ(g.basis().cols(), 4);
  EXPECT_EQ(g.reparam_name(), "identity");
  EXPECT_EQ(g.ts().front(), 0.0);
  EXPECT_EQ(g.ts().back(), 1.0);
  for (std::size_t j = 1; j < g.size(); ++j) EXPECT_GT(g.ts()[j], g.ts()[j - 1]);
  for (int j = 0; j < 100; ++j) {
    EXPECT_NEAR(g.basis().row(j).sum(), 1.0, 1e-12);
    for (int i = 0; i < 4; ++i) {
      EXPECT_GE(g.basis()(j, i), 0.0);
      EXPECT_LE(g.basis()(j, i), 1.0);
    }
  }
}

TEST(SampleGrid, QuadraticMiddleRow) {
  const auto g = build_sample_grid(2, 3);
  EXPECT_NEAR(g.basis()(1, 0), 0.25, 1e-15);
  EXPECT_NEAR(g.basis()(1, 1), 0.5, 1e-15);
  EXPECT_NEAR(g.basis()(1, 2), 0.25, 1e-15);
}

TEST(SampleGrid, RejectsTooFewSamples) {
  EXPECT_THROW(build_sample_grid(3, 1), std::invalid_argument);
  EXPECT_THROW(build_sample_grid(0, 10), std::invalid_argument);
}

TEST(SampleGrid, CustomReparameterization) {
  const Reparameterization square{"square", [](double t) { return t * t; }};
  const auto g = build_sample_grid(3, 3, square);
  EXPECT_EQ(g.reparam_name(), "square");
  const auto w = bernstein_basis(3, 0.25);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(g.basis()(1, i), w[i], 1e-15);
}

TEST(SampleCurve, StraightLineMidpoint) {
  const BezierCurve line({{0, 0}, {1.0 / 3, 1.0 / 3}, {2.0 / 3, 2.0 / 3}, {1, 1}});
  const auto pts = sample_curve(line, build_sample_grid(3, 3));
  expect_near(pts[1], {0.5, 0.5}, 1e-15);
}

TEST(SampleCurve, ArchMidpoint) {
  const auto pts = sample_curve(arch(), build_sample_grid(3, 3));
  expect_near(pts[1], {0.5, 0.75}, 1e-15);
}

TEST(SampleCurve, OrderMismatch) {
  EXPECT_THROW(sample_curve(arch(), build_sample_grid(2, 10)), std::invalid_argument);
}

TEST(SampleCurve, MatchesDeCasteljau) {
  std::mt19937_64 rng(12);
  for (int n = 1; n <= 5; ++n) {
    const auto g = build_sample_grid(n, 37);
    for (int k = 0; k < 50; ++k) {
      std::vector<Point> cp(n + 1);
      std::uniform_real_distribution<double> u(-2.0, 2.0);
      for (auto& p : cp) p = {u(rng), u(rng)};
      const BezierCurve c(cp);
      const auto pts = sample_curve(c, g);
      for (std::size_t j = 0; j < g.size(); ++j) {
        expect_near(pts[j], oracle::de_casteljau(cp, g.ts()[j]), 1e-13);
        expect_near(c.evaluate(g.ts()[j]), oracle::de_casteljau(cp, g.ts()[j]), 1e-13);
      }
    }
  }
}

TEST(SampleCurve, EndpointInterpolationIsExact) {
  std::mt19937_64 rng(13);
  const auto g = build_sample_grid(3);
  for (int k = 0; k < 1000; ++k) {
    const BezierCurve c(oracle::random_cubic(rng, -3, 3));
    const auto pts = sample_curve(c, g);
    EXPECT_EQ(pts.front(), c[0]);
    EXPECT_EQ(pts.back(), c[3]);
    EXPECT_EQ(c.evaluate(0.0), c[0]);
    EXPECT_EQ(c.evaluate(1.0), c[3]);
  }
}

TEST(SampleCurve, SamplesStayInControlHull) {
  std::mt19937_64 rng(14);
  const auto g = build_sample_grid(3);
  int checked = 0;
  for (int k = 0; k < 300; ++k) {
    const BezierCurve c(oracle::random_cubic(rng));
    const auto hull = control_hull(c);
    for (const auto& p : sample_curve(c, g)) {
      EXPECT_TRUE(contains(hull, p, 1e-9));
      ++checked;
    }
  }
  EXPECT_EQ(checked, 30000);
}

TEST(Fit, RoundTripFromSameParameters) {
  std::mt19937_64 rng(15);
  for (int k = 0; k < 100; ++k) {
    const BezierCurve truth(oracle::random_cubic(rng));
    std::vector<Point> pts;
    std::vector<double> ts;
    for (int j = 0; j < 50; ++j) {
      ts.push_back(j / 49.0);
      pts.push_back(truth.evaluate(ts.back()));
    }
    const auto fit = fit_least_squares(pts, ts, 3);
    for (int i = 0; i < 4; ++i) expect_near(fit.curve[i], truth[i], 1e-6);
    EXPECT_LT(fit.rms_residual, 1e-9);
    const auto uniform = fit_least_squares(Polyline{pts, {}}, 3, {Parameterization::uniform});
    for (int i = 0; i < 4; ++i) expect_near(uniform.curve[i], truth[i], 1e-6);
  }
}

TEST(Fit, CollinearPointsGiveCollinearControlPoints) {
  std::vector<Point> pts;
  for (int j = 0; j < 20; ++j) {
    const double v = 0.1 + 0.8 * j / 19.0 + 0.01 * std::sin(j);
    pts.push_back({v, v});
  }
  const auto fit = fit_least_squares(Polyline{pts, {}});
  for (const auto& p : fit.curve.control_points()) EXPECT_NEAR(p.x, p.y, 1e-9);
}

TEST(Fit, NoiseRobustness) {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> noise(-0.001, 0.001);
  const auto g = build_sample_grid(3);
  for (int k = 0; k < 50; ++k) {
    const BezierCurve truth(oracle::random_cubic(rng, 0.1, 0.9));
    std::vector<Point> pts;
    for (int j = 0; j < 100; ++j) {
      const Point p = truth.evaluate(j / 99.0);
      pts.push_back({p.x + noise(rng), p.y + noise(rng)});
    }
    const auto fit = fit_least_squares(Polyline{pts, {}}, 3, {Parameterization::uniform});
    const auto a = sample_curve(fit.curve, g);
    const auto b = sample_curve(truth, g);
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_LT(distance(a[j], b[j]), 0.01);
  }
}

TEST(Fit, EndpointsAreNotPinned) {
  // A symmetric zigzag: the least-squares curve does not pass through the
  // first annotation point.
  std::vector<Point> pts;
  for (int j = 0; j < 21; ++j) pts.push_back({j / 20.0, (j % 2) ? 0.1 : 0.0});
  const auto fit = fit_least_squares(Polyline{pts, {}}, 3, {Parameterization::uniform});
  EXPECT_GT(distance(fit.curve[0], pts.front()), 1e-3);
}

TEST(Fit, IdempotentOnFittedCurve) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    std::vector<Point> pts;
    for (int j = 0; j < 30; ++j) pts.push_back({u(rng), j / 29.0});
    const auto first = fit_least_squares(Polyline{pts, {}}, 3, {Parameterization::uniform});
    std::vector<Point> samples;
    for (int j = 0; j < 30; ++j) samples.push_back(first.curve.evaluate(j / 29.0));
    const auto second = fit_least_squares(Polyline{samples, {}}, 3, {Parameterization::uniform});
    for (int i = 0; i < 4; ++i) expect_near(second.curve[i], first.curve[i], 1e-8);
  }
}

TEST(Fit, DensifiesShortPolylines) {
  const auto fit = fit_least_squares(Polyline{{{0, 0}, {1, 2}}, {}});
  EXPECT_TRUE(fit.densified);
  EXPECT_FALSE(fit.rank_deficient);
  for (const auto& p : fit.curve.control_points()) EXPECT_NEAR(p.y, 2 * p.x, 1e-12);
  expect_near(fit.curve[0], {0, 0}, 1e-12);
  expect_near(fit.curve[3], {1, 2}, 1e-12);
  EXPECT_NEAR(fit.rms_residual, 0.0, 1e-12);
}

TEST(Fit, RankDeficientUsesMinimumNorm) {
  // All parameters equal: the basis has rank 1.
  const std::vector<Point> pts{{1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}};
  const std::vector<double> ts(5, 0.5);
  const auto fit = fit_least_squares(pts, ts, 3);
  EXPECT_TRUE(fit.rank_deficient);
  expect_near(fit.curve.evaluate(0.5), {1, 1}, 1e-12);
  // Minimum norm: control points proportional to the basis row.
  const auto w = bernstein_basis(3, 0.5);
  double ww = 0.0;
  for (double v : w) ww += v * v;
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(fit.curve[i].x, w[i] / ww, 1e-12);
}

TEST(Fit, ArgumentErrors) {
  EXPECT_THROW(fit_least_squares(Polyline{{{0, 0}}, {}}), std::invalid_argument);
  EXPECT_THROW(fit_least_squares(Polyline{{{0, 0}, {1, 1}}, {}}, 0), std::invalid_argument);
  const std::vector<Point> pts{{0, 0}, {1, 1}};
  const std::vector<double> bad{0.0, 1.5};
  EXPECT_THROW(fit_least_squares(pts, bad, 1), std::domain_error);
  const std::vector<double> short_ts{0.0};
  EXPECT_THROW(fit_least_squares(pts, short_ts, 1), std::invalid_argument);
}

TEST(Fit, ChordLengthParameters) {
  const std::vector<Point> pts{{0, 0}, {1, 0}, {1, 3}};
  const auto ts = assign_parameters(pts, Parameterization::chord_length);
  EXPECT_EQ(ts, (std::vector<double>{0.0, 0.25, 1.0}));
  EXPECT_EQ(assign_parameters(pts, Parameterization::uniform), (std::vector<double>{0.0, 0.5, 1.0}));
  const std::vector<Point> same{{2, 2}, {2, 2}, {2, 2}};
  EXPECT_EQ(assign_parameters(same, Parameterization::chord_length), (std::vector<double>{0.0, 0.5, 1.0}));
}

TEST(Affine, IdentityAndTranslation) {
  const auto c = arch();
  EXPECT_EQ(affine_transform(c, AffineTransform::identity()), c);
  const auto moved = affine_transform(c, AffineTransform::translation(0.1, 0.2));
  const auto g = build_sample_grid(3);
  const auto a = sample_curve(c, g);
  const auto b = sample_curve(moved, g);
  for (std::size_t j = 0; j < a.size(); ++j) expect_near(b[j] - a[j], {0.1, 0.2}, 1e-15);
}

TEST(Affine, RotationAboutCenter) {
  std::mt19937_64 rng(18);
  const auto rot = AffineTransform::rotation(10.0 * M_PI / 180.0, {0.5, 0.5});
  const auto g = build_sample_grid(3);
  const BezierCurve c(oracle::random_cubic(rng));
  const auto a = sample_curve(affine_transform(c, rot), g);
  const auto b = sample_curve(c, g);
  for (std::size_t j = 0; j < a.size(); ++j) expect_near(a[j], rot.apply(b[j]), 1e-12);
}

TEST(Affine, CommutesWithSampling) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const auto g = build_sample_grid(3);
  for (int k = 0; k < 1000; ++k) {
    const BezierCurve c(oracle::random_cubic(rng));
    AffineTransform t{{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)}};
    const auto a = sample_curve(affine_transform(c, t), g);
    const auto b = sample_curve(c, g);
    for (std::size_t j = 0; j < a.size(); ++j) expect_near(a[j], t.apply(b[j]), 1e-12);
  }
}

TEST(Affine, RejectsNonFinite) {
  EXPECT_THROW(affine_transform(arch(), AffineTransform{{1, 0, NAN, 0, 1, 0}}), std::invalid_argument);
}

TEST(Cut, FullRangeIsIdentity) {
  const auto c = arch();
  const auto cut = cut_curve(c, 0.0, 1.0);
  for (int i = 0; i < 4; ++i) expect_near(cut[i], c[i], 1e-15);
}

TEST(Cut, HalfEndsAtMidpoint) {
  const auto cut = cut_curve(arch(), 0.0, 0.5);
  expect_near(cut[3], {0.5, 0.75}, 1e-15);
  expect_near(cut[3], sample_curve(arch(), build_sample_grid(3, 3))[1], 1e-15);
}

TEST(Cut, ReparameterizationIdentity) {
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const BezierCurve c(oracle::random_cubic(rng));
    double t0 = u(rng), t1 = u(rng);
    if (t0 > t1) std::swap(t0, t1);
    if (t0 == t1) continue;
    const auto cut = cut_curve(c, t0, t1);
    for (int j = 0; j < 100; ++j) {
      const double s = j / 99.0;
      expect_near(cut.evaluate(s), oracle::de_casteljau(c.control_points(), t0 + (t1 - t0) * s), 1e-9);
    }
  }
}

TEST(Cut, Errors) {
  EXPECT_THROW(cut_curve(arch(), 0.5, 0.5), std::invalid_argument);
  EXPECT_THROW(cut_curve(arch(), 0.6, 0.5), std::invalid_argument);
  EXPECT_THROW(cut_curve(arch(), -0.1, 0.5), std::invalid_argument);
  EXPECT_THROW(cut_curve(arch(), 0.1, 1.1), std::invalid_argument);
  EXPECT_THROW(cut_curve(BezierCurve({{0, 0}, {1, 1}, {2, 0}}), 0.1, 0.5), UnsupportedOrderError);
}

TEST(Clip, InsideCurveUnchanged) {
  const BezierCurve c({{0.1, 0.1}, {0.2, 0.5}, {0.7, 0.4}, {0.9, 0.9}});
  const auto clipped = clip_to_box(c, Box::unit());
  ASSERT_TRUE(clipped);
  EXPECT_EQ(*clipped, c);
}

TEST(Clip, OutsideCurveAbsent) {
  const BezierCurve c({{2, 2}, {3, 2}, {3, 3}, {2, 3}});
  EXPECT_FALSE(clip_to_box(c, Box::unit()));
}

TEST(Clip, LineEnteringFromLeft) {
  const BezierCurve c({{-0.5, 0.5}, {-0.5 + 1.0 / 3, 0.5}, {-0.5 + 2.0 / 3, 0.5}, {0.5, 0.5}});
  const auto clipped = clip_to_box(c, Box::unit());
  ASSERT_TRUE(clipped);
  expect_near((*clipped)[0], {0.0, 0.5}, 1e-3);
  expect_near((*clipped)[3], {0.5, 0.5}, 1e-15);
  EXPECT_TRUE(Box::unit().contains((*clipped)[0]));
}

TEST(Clip, KeepsLongestRun) {
  // Enters the box, leaves through the top briefly, comes back for longer.
  const BezierCurve c({{0.05, 0.5}, {0.3, -0.6}, {0.5, 1.6}, {0.95, 0.5}});
  const auto clipped = clip_to_box(c, Box::unit());
  ASSERT_TRUE(clipped);
  const Box slack{-1e-6, -1e-6, 1 + 1e-6, 1 + 1e-6};
  for (const auto& p : sample_curve(*clipped, build_sample_grid(3))) EXPECT_TRUE(slack.contains(p));
}

TEST(Clip, DegenerateBox) {
  EXPECT_THROW(clip_to_box(arch(), Box{0, 0, 0, 1}), std::invalid_argument);
}
