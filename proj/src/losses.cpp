#include <bezlane/losses.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bezlane {

double sampling_distance(const BezierCurve& a, const BezierCurve& b, const SampleGrid& grid) {
  const auto pa = sample_curve(a, grid);
  const auto pb = sample_curve(b, grid);
  double sum = 0.0;
  for (std::size_t j = 0; j < pa.size(); ++j) sum += std::abs(pa[j].x - pb[j].x) + std::abs(pa[j].y - pb[j].y);
  return sum / static_cast<double>(pa.size());
}

double match_quality(double class_score, double distance, double alpha) {
  if (!(class_score >= 0.0 && class_score <= 1.0)) {
    throw std::invalid_argument(fmt::format("class score {} outside [0, 1]", class_score));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument(fmt::format("alpha {} outside [0, 1]", alpha));
  if (!(distance >= 0.0)) throw std::invalid_argument(fmt::format("distance {} is negative", distance));
  const double d = std::min(distance, 1.0);
  return std::pow(class_score, 1.0 - alpha) * std::pow(1.0 - d, alpha);
}

QualityMatrix::QualityMatrix(WeightMatrix values, double alpha) : values_(std::move(values)), alpha_(alpha) {
  if (values_.rows() > values_.cols()) {
    throw std::invalid_argument(
        fmt::format("{} labels exceed {} predictions", values_.rows(), values_.cols()));
  }
  for (double q : values_.data()) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument(fmt::format("quality {} outside [0, 1]", q));
  }
}

QualityMatrix build_quality_matrix(const QualityInputs& inputs, const SampleGrid& grid, double alpha,
                                   WeightMatrix* distances) {
  if (inputs.scores.size() != inputs.predictions.size()) {
    throw std::invalid_argument(fmt::format("{} scores for {} predictions", inputs.scores.size(),
                                            inputs.predictions.size()));
  }
  const std::size_t g = inputs.labels.size();
  const std::size_t n = inputs.predictions.size();
  WeightMatrix q(g, n);
  WeightMatrix d(g, n);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      d(i, j) = sampling_distance(inputs.labels[i], inputs.predictions[j], grid);
      q(i, j) = match_quality(inputs.scores[j], d(i, j), alpha);
    }
  }
  if (distances) *distances = std::move(d);
  return QualityMatrix(std::move(q), alpha);
}

namespace {

MatchAssignment to_match(const QualityMatrix& quality, const std::vector<std::size_t>& column_of_row) {
  MatchAssignment out;
  for (std::size_t i = 0; i < column_of_row.size(); ++i) {
    out.pairs.emplace_back(i, column_of_row[i]);
    out.qualities.push_back(quality(i, column_of_row[i]));
    out.total_quality += out.qualities.back();
  }
  return out;
}

}  // namespace

MatchAssignment hungarian_match(const QualityMatrix& quality) {
  return to_match(quality, solve_max_assignment(quality.values()).column_of_row);
}

MatchAssignment hungarian_match(const QualityMatrix& quality, const std::vector<bool>& eligible) {
  const std::size_t g = quality.labels();
  const std::size_t n = quality.predictions();
  if (eligible.size() != n) {
    throw std::invalid_argument(fmt::format("eligibility mask has {} entries for {} predictions",
                                            eligible.size(), n));
  }
  // Any use of an ineligible column costs more than all qualities combined,
  // so eligible columns are exhausted first.
  const double penalty = static_cast<double>(g) + 1.0;
  WeightMatrix masked = quality.values();
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!eligible[j]) masked(i, j) = -penalty;
    }
  }
  auto columns = solve_max_assignment(masked).column_of_row;

  std::vector<std::size_t> stranded;
  std::vector<char> taken(n, 0);
  for (std::size_t i = 0; i < g; ++i) {
    if (eligible[columns[i]]) {
      taken[columns[i]] = 1;
    } else {
      stranded.push_back(i);
    }
  }
  if (!stranded.empty()) {
    std::vector<std::size_t> free_cols;
    for (std::size_t j = 0; j < n; ++j) {
      if (!taken[j]) free_cols.push_back(j);
    }
    WeightMatrix sub(stranded.size(), free_cols.size());
    for (std::size_t a = 0; a < stranded.size(); ++a) {
      for (std::size_t b = 0; b < free_cols.size(); ++b) sub(a, b) = quality(stranded[a], free_cols[b]);
    }
    const auto fallback = solve_max_assignment(sub).column_of_row;
    for (std::size_t a = 0; a < stranded.size(); ++a) columns[stranded[a]] = free_cols[fallback[a]];
  }
  auto out = to_match(quality, columns);
  out.fallback_labels = std::move(stranded);
  return out;
}

std::vector<bool> local_max_filter(std::span<const double> logits) {
  const std::size_t n = logits.size();
  std::vector<bool> mask(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || logits[i] >= logits[i - 1];
    const bool right_ok = i + 1 == n || logits[i] >= logits[i + 1];
    mask[i] = left_ok && right_ok;
  }
  return mask;
}

double weighted_bce(double prob, int target, double neg_weight) {
  if (target != 0 && target != 1) throw std::invalid_argument(fmt::format("BCE target must be 0 or 1, got {}", target));
  const double p = std::clamp(prob, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
  const double y = static_cast<double>(target);
  return -(y * std::log(p) + neg_weight * (1.0 - y) * std::log(1.0 - p));
}

void LossWeights::validate() const {
  for (double w : {reg, cls, seg, neg_weight}) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument(fmt::format("loss weight {} must be finite and non-negative", w));
    }
  }
}

double total_loss(double reg, double cls, double seg, const LossWeights& weights) {
  weights.validate();
  return weights.reg * reg + weights.cls * cls + weights.seg * seg;
}

}  // namespace bezlane
