#pragma once

#include <bezlane/geometry.hpp>

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bezlane {

inline constexpr int kDefaultOrder = 3;
inline constexpr int kDefaultSampleCount = 100;

/// Bezier curve of order n with n+1 control points in normalized image units.
class BezierCurve {
 public:
  /// Throws std::invalid_argument if fewer than two points or any coordinate
  /// is not finite.
  explicit BezierCurve(std::vector<Point> control_points);

  int order() const { return static_cast<int>(points_.size()) - 1; }
  const std::vector<Point>& control_points() const { return points_; }
  const Point& operator[](std::size_t i) const { return points_[i]; }

  /// Direct Bernstein evaluation; t must lie in [0,1].
  Point evaluate(double t) const;

  friend bool operator==(const BezierCurve&, const BezierCurve&) = default;

 private:
  std::vector<Point> points_;
};

/// Bernstein weights b_{i,n}(t) for i = 0..n. Throws std::domain_error if t
/// is outside [0,1] and std::invalid_argument if n < 1.
std::vector<double> bernstein_basis(int n, double t);

/// Parameter re-mapping f applied before basis evaluation. Only the identity
/// ships; the hook exists so sampling experiments can swap it.
struct Reparameterization {
  std::string name;
  std::function<double(double)> map;

  static Reparameterization identity();
};

/// Bernstein basis precomputed at a fixed, uniformly spaced set of t values,
/// so sampling any curve of the same order is a single matrix product.
class SampleGrid {
 public:
  int order() const { return order_; }
  std::size_t size() const { return ts_.size(); }
  const std::vector<double>& ts() const { return ts_; }
  /// |ts| x (order+1) matrix, entry (j, i) = b_{i,n}(f(t_j)).
  const Eigen::MatrixXd& basis() const { return basis_; }
  const std::string& reparam_name() const { return reparam_name_; }

 private:
  friend SampleGrid build_sample_grid(int, int, const Reparameterization&);
  int order_ = 0;
  std::vector<double> ts_;
  Eigen::MatrixXd basis_;
  std::string reparam_name_;
};

/// Throws std::invalid_argument if count < 2.
SampleGrid build_sample_grid(int order, int count = kDefaultSampleCount,
                             const Reparameterization& reparam = Reparameterization::identity());

/// Samples the curve at every grid parameter. Throws std::invalid_argument on
/// order mismatch.
std::vector<Point> sample_curve(const BezierCurve& curve, const SampleGrid& grid);

/// Ordered annotation points of one lane in normalized units.
struct Polyline {
  std::vector<Point> points;
  ImageSize source_image_size;
};

enum class Parameterization {
  chord_length,  ///< cumulative polyline length, normalized to [0,1]
  uniform,       ///< t_j = j / (m-1)
};

struct FitOptions {
  Parameterization parameterization = Parameterization::chord_length;
};

struct FitResult {
  BezierCurve curve;
  /// RMS of |B(t_j) - k_j| over the fitted points.
  double rms_residual = 0.0;
  /// Basis matrix lacked full column rank; the minimum-norm solution was used.
  bool rank_deficient = false;
  /// Input had fewer than order+1 points and was linearly densified.
  bool densified = false;
};

/// Least-squares control points for the polyline. Endpoints are free, not
/// pinned to the first and last annotation points. Throws
/// std::invalid_argument for fewer than two points or order < 1.
FitResult fit_least_squares(const Polyline& polyline, int order = kDefaultOrder,
                            const FitOptions& options = {});

/// Same fit with caller-chosen parameters, one per point, each in [0,1]
/// (std::domain_error otherwise).
FitResult fit_least_squares(std::span<const Point> points, std::span<const double> ts, int order);

/// Parameter assignment used by fit_least_squares for the given points.
std::vector<double> assign_parameters(std::span<const Point> points, Parameterization parameterization);

/// Maps every control point through `transform`; this maps the whole curve.
BezierCurve affine_transform(const BezierCurve& curve, const AffineTransform& transform);

/// Sub-curve over [t0, t1] of a cubic, re-parameterized to [0,1]. Throws
/// std::invalid_argument unless 0 <= t0 < t1 <= 1, UnsupportedOrderError for
/// non-cubic input.
BezierCurve cut_curve(const BezierCurve& curve, double t0, double t1);

struct ClipOptions {
  int scan_samples = kDefaultSampleCount;
  double parameter_tolerance = 1e-4;
};

/// Longest contiguous in-box portion of a cubic, or nullopt if no scanned
/// sample falls inside `box`.
std::optional<BezierCurve> clip_to_box(const BezierCurve& curve, const Box& box,
                                       const ClipOptions& options = {});

}  // namespace bezlane
