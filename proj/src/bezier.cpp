#include <bezlane/bezier.hpp>
#include <bezlane/errors.hpp>

#include <Eigen/QR>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bezlane {

namespace {

double binomial(int n, int k) {
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return c;
}

// Bernstein weights without the range check; t is trusted.
void fill_basis(int n, double t, double* out) {
  const double u = 1.0 - t;
  for (int i = 0; i <= n; ++i) {
    out[i] = binomial(n, i) * std::pow(t, i) * std::pow(u, n - i);
  }
}

Eigen::MatrixX2d to_matrix(std::span<const Point> points) {
  Eigen::MatrixX2d m(points.size(), 2);
  for (std::size_t i = 0; i < points.size(); ++i) {
    m(i, 0) = points[i].x;
    m(i, 1) = points[i].y;
  }
  return m;
}

std::vector<Point> densify(std::span<const Point> points, std::size_t target) {
  const auto ts = assign_parameters(points, Parameterization::chord_length);
  std::vector<Point> out;
  out.reserve(target);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < target; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(target - 1);
    while (seg + 2 < points.size() && ts[seg + 1] < s) ++seg;
    const double span = ts[seg + 1] - ts[seg];
    const double a = span > 0.0 ? std::clamp((s - ts[seg]) / span, 0.0, 1.0) : 0.0;
    out.push_back(points[seg] + a * (points[seg + 1] - points[seg]));
  }
  return out;
}

}  // namespace

BezierCurve::BezierCurve(std::vector<Point> control_points) : points_(std::move(control_points)) {
  if (points_.size() < 2) {
    throw std::invalid_argument("BezierCurve needs at least two control points");
  }
  for (const auto& p : points_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("BezierCurve control point is not finite");
    }
  }
}

Point BezierCurve::evaluate(double t) const {
  const auto w = bernstein_basis(order(), t);
  Point p;
  for (std::size_t i = 0; i < points_.size(); ++i) p = p + w[i] * points_[i];
  return p;
}

std::vector<double> bernstein_basis(int n, double t) {
  if (n < 1) throw std::invalid_argument(fmt::format("curve order must be >= 1, got {}", n));
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error(fmt::format("t = {} outside [0, 1]", t));
  std::vector<double> w(n + 1);
  fill_basis(n, t, w.data());
  return w;
}

Reparameterization Reparameterization::identity() {
  return {"identity", [](double t) { return t; }};
}

SampleGrid build_sample_grid(int order, int count, const Reparameterization& reparam) {
  if (count < 2) throw std::invalid_argument(fmt::format("sample count must be >= 2, got {}", count));
  if (order < 1) throw std::invalid_argument(fmt::format("curve order must be >= 1, got {}", order));
  SampleGrid grid;
  grid.order_ = order;
  grid.reparam_name_ = reparam.name;
  grid.ts_.resize(count);
  grid.basis_.resize(count, order + 1);
  std::vector<double> row(order + 1);
  for (int j = 0; j < count; ++j) {
    // Pin the last parameter to exactly 1 so endpoint interpolation is exact.
    const double t = j + 1 == count ? 1.0 : static_cast<double>(j) / (count - 1);
    grid.ts_[j] = t;
    const double ft = reparam.map(t);
    if (!(ft >= 0.0 && ft <= 1.0)) {
      throw std::domain_error(fmt::format("reparameterization '{}' maps {} outside [0, 1]", reparam.name, t));
    }
    fill_basis(order, ft, row.data());
    for (int i = 0; i <= order; ++i) grid.basis_(j, i) = row[i];
  }
  return grid;
}

std::vector<Point> sample_curve(const BezierCurve& curve, const SampleGrid& grid) {
  if (curve.order() != grid.order()) {
    throw std::invalid_argument(
        fmt::format("curve order {} does not match sample grid order {}", curve.order(), grid.order()));
  }
  const Eigen::MatrixX2d samples = grid.basis() * to_matrix(curve.control_points());
  std::vector<Point> out(grid.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = {samples(j, 0), samples(j, 1)};
  return out;
}

std::vector<double> assign_parameters(std::span<const Point> points, Parameterization parameterization) {
  const std::size_t m = points.size();
  std::vector<double> ts(m, 0.0);
  if (m < 2) return ts;
  if (parameterization == Parameterization::chord_length) {
    for (std::size_t i = 1; i < m; ++i) ts[i] = ts[i - 1] + distance(points[i], points[i - 1]);
    const double total = ts.back();
    if (total > 0.0) {
      for (auto& t : ts) t /= total;
      ts.back() = 1.0;
      return ts;
    }
    // All points coincide; chord length is undefined, fall through to uniform.
  }
  for (std::size_t i = 0; i < m; ++i) ts[i] = static_cast<double>(i) / static_cast<double>(m - 1);
  return ts;
}

FitResult fit_least_squares(std::span<const Point> points, std::span<const double> ts, int order) {
  if (order < 1) throw std::invalid_argument(fmt::format("curve order must be >= 1, got {}", order));
  if (points.size() < 2) throw std::invalid_argument("fitting needs at least two points");
  if (ts.size() != points.size()) {
    throw std::invalid_argument(
        fmt::format("{} parameters given for {} points", ts.size(), points.size()));
  }
  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd basis(m, order + 1);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto w = bernstein_basis(order, ts[j]);
    for (int i = 0; i <= order; ++i) basis(j, i) = w[i];
  }
  const Eigen::MatrixX2d targets = to_matrix(points);

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(basis);
  const Eigen::MatrixX2d control = cod.solve(targets);

  std::vector<Point> cps(order + 1);
  for (int i = 0; i <= order; ++i) cps[i] = {control(i, 0), control(i, 1)};

  const Eigen::MatrixX2d residual = basis * control - targets;
  const double rms = std::sqrt(residual.rowwise().squaredNorm().mean());
  return FitResult{BezierCurve(std::move(cps)), rms, cod.rank() < order + 1, false};
}

FitResult fit_least_squares(const Polyline& polyline, int order, const FitOptions& options) {
  if (order < 1) throw std::invalid_argument(fmt::format("curve order must be >= 1, got {}", order));
  if (polyline.points.size() < 2) throw std::invalid_argument("fitting needs at least two points");
  std::span<const Point> points = polyline.points;
  std::vector<Point> dense;
  const auto needed = static_cast<std::size_t>(order + 1);
  if (points.size() < needed) {
    dense = densify(points, 2 * needed);
    points = dense;
  }
  const auto ts = assign_parameters(points, options.parameterization);
  auto result = fit_least_squares(points, ts, order);
  result.densified = !dense.empty();
  return result;
}

BezierCurve affine_transform(const BezierCurve& curve, const AffineTransform& transform) {
  if (!transform.finite()) throw std::invalid_argument("affine transform has non-finite entries");
  std::vector<Point> cps;
  cps.reserve(curve.control_points().size());
  for (const auto& p : curve.control_points()) cps.push_back(transform.apply(p));
  return BezierCurve(std::move(cps));
}

BezierCurve cut_curve(const BezierCurve& curve, double t0, double t1) {
  if (curve.order() != 3) {
    throw UnsupportedOrderError(fmt::format("cutting supports cubic curves only, got order {}", curve.order()));
  }
  if (!(t0 >= 0.0 && t0 < t1 && t1 <= 1.0)) {
    throw std::invalid_argument(fmt::format("cut interval [{}, {}] must satisfy 0 <= t0 < t1 <= 1", t0, t1));
  }
  const double u0 = 1.0 - t0;
  const double u1 = 1.0 - t1;
  // Row k holds the weights of P0..P3 for the k-th new control point. Each row
  // is the cubic blossom evaluated at a multiset of {t0, t1}.
  const double w[4][4] = {
      {u0 * u0 * u0, 3.0 * t0 * u0 * u0, 3.0 * t0 * t0 * u0, t0 * t0 * t0},
      {u0 * u0 * u1, t0 * u0 * u1 + u0 * t0 * u1 + u0 * u0 * t1, t0 * t0 * u1 + u0 * t0 * t1 + t0 * u0 * t1,
       t0 * t0 * t1},
      {u0 * u1 * u1, t0 * u1 * u1 + u0 * t1 * u1 + u0 * u1 * t1, t0 * t1 * u1 + u0 * t1 * t1 + t0 * u1 * t1,
       t0 * t1 * t1},
      {u1 * u1 * u1, 3.0 * t1 * u1 * u1, 3.0 * t1 * t1 * u1, t1 * t1 * t1},
  };
  std::vector<Point> cps(4);
  for (int k = 0; k < 4; ++k) {
    Point p;
    for (int i = 0; i < 4; ++i) p = p + w[k][i] * curve[i];
    cps[k] = p;
  }
  return BezierCurve(std::move(cps));
}

std::optional<BezierCurve> clip_to_box(const BezierCurve& curve, const Box& box, const ClipOptions& options) {
  if (box.degenerate()) throw std::invalid_argument("clip box is degenerate");
  const int count = std::max(options.scan_samples, 2);
  auto param = [count](int j) { return j + 1 == count ? 1.0 : static_cast<double>(j) / (count - 1); };

  // Longest run of consecutive in-box samples; earliest run wins ties.
  int best_start = -1;
  int best_len = 0;
  int run_start = -1;
  for (int j = 0; j <= count; ++j) {
    const bool inside = j < count && box.contains(curve.evaluate(param(j)));
    if (inside && run_start < 0) run_start = j;
    if (!inside && run_start >= 0) {
      if (j - run_start > best_len) {
        best_len = j - run_start;
        best_start = run_start;
      }
      run_start = -1;
    }
  }
  if (best_start < 0) return std::nullopt;
  const int best_end = best_start + best_len - 1;

  // Bisect between an outside and an inside parameter, keeping the inside end.
  auto refine = [&](double outside, double inside) {
    while (std::abs(inside - outside) > options.parameter_tolerance) {
      const double mid = 0.5 * (inside + outside);
      (box.contains(curve.evaluate(mid)) ? inside : outside) = mid;
    }
    return inside;
  };
  const double t0 = best_start == 0 ? 0.0 : refine(param(best_start - 1), param(best_start));
  const double t1 = best_end == count - 1 ? 1.0 : refine(param(best_end + 1), param(best_end));
  if (!(t1 > t0)) return std::nullopt;
  if (t0 == 0.0 && t1 == 1.0) return curve;
  return cut_curve(curve, t0, t1);
}

}  // namespace bezlane
