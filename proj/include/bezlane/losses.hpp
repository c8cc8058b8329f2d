#pragma once

#include <bezlane/assignment.hpp>
#include <bezlane/bezier.hpp>

#include <span>
#include <utility>
#include <vector>

namespace bezlane {

inline constexpr double kDefaultAlpha = 0.8;
inline constexpr double kDefaultNegWeight = 0.4;
inline constexpr double kProbabilityEpsilon = 1e-7;

/// Mean over grid samples of |dx| + |dy| between the two curves.
/// Throws std::invalid_argument if either curve's order differs from the grid.
double sampling_distance(const BezierCurve& a, const BezierCurve& b, const SampleGrid& grid);

/// p^(1-alpha) * (1-d)^alpha with d clamped to [0,1]. Throws
/// std::invalid_argument if p or alpha is outside [0,1] or d is negative/NaN.
double match_quality(double class_score, double distance, double alpha = kDefaultAlpha);

/// G x N label/prediction matching quality, entries in [0,1], G <= N.
class QualityMatrix {
 public:
  QualityMatrix(WeightMatrix values, double alpha);

  std::size_t labels() const { return values_.rows(); }
  std::size_t predictions() const { return values_.cols(); }
  double alpha() const { return alpha_; }
  double operator()(std::size_t label, std::size_t pred) const { return values_(label, pred); }
  const WeightMatrix& values() const { return values_; }

 private:
  WeightMatrix values_;
  double alpha_;
};

struct QualityInputs {
  std::span<const BezierCurve> labels;
  std::span<const BezierCurve> predictions;
  std::span<const double> scores;
};

/// Builds Q from sampling distances and class scores. The distance matrix
/// (G x N) is returned through `distances` when non-null.
QualityMatrix build_quality_matrix(const QualityInputs& inputs, const SampleGrid& grid,
                                   double alpha = kDefaultAlpha, WeightMatrix* distances = nullptr);

struct MatchAssignment {
  /// (label_index, prediction_index), one per label, in label order.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<double> qualities;
  double total_quality = 0.0;
  /// Labels that had no eligible prediction under a matching prior and were
  /// matched without it.
  std::vector<std::size_t> fallback_labels;
};

/// One-to-one assignment maximizing total quality; ties go to the lowest
/// prediction index, label by label.
MatchAssignment hungarian_match(const QualityMatrix& quality);

/// Same, restricted to predictions whose `eligible` flag is set. Labels left
/// without an eligible prediction are matched among the remaining predictions
/// on unfiltered quality and reported in fallback_labels.
MatchAssignment hungarian_match(const QualityMatrix& quality, const std::vector<bool>& eligible);

/// True where the logit is >= each existing neighbor.
std::vector<bool> local_max_filter(std::span<const double> logits);

/// -(y log p + w (1-y) log(1-p)) with p clamped to [1e-7, 1-1e-7].
double weighted_bce(double prob, int target, double neg_weight = kDefaultNegWeight);

struct LossWeights {
  double reg = 1.0;
  double cls = 0.1;
  double seg = 0.75;
  double neg_weight = kDefaultNegWeight;

  /// Throws std::invalid_argument if any weight is negative or not finite.
  void validate() const;
};

/// Weighted sum; validates the weights first.
double total_loss(double reg, double cls, double seg, const LossWeights& weights = {});

}  // namespace bezlane
