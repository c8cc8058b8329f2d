#include <bezlane/assignment.hpp>
#include <bezlane/metrics.hpp>
#include <bezlane/parallel.hpp>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <stdexcept>

namespace bezlane {

namespace {

// Solves a rows x cols assignment on `score` where the smaller side becomes
// the row set. Returns (row, col) pairs in the original orientation.
std::vector<std::pair<std::size_t, std::size_t>> best_pairs(const WeightMatrix& score) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (score.rows() == 0 || score.cols() == 0) return pairs;
  if (score.rows() <= score.cols()) {
    const auto a = solve_max_assignment(score);
    for (std::size_t r = 0; r < score.rows(); ++r) pairs.emplace_back(r, a.column_of_row[r]);
    return pairs;
  }
  WeightMatrix t(score.cols(), score.rows());
  for (std::size_t r = 0; r < score.rows(); ++r) {
    for (std::size_t c = 0; c < score.cols(); ++c) t(c, r) = score(r, c);
  }
  const auto a = solve_max_assignment(t);
  for (std::size_t c = 0; c < t.rows(); ++c) pairs.emplace_back(a.column_of_row[c], c);
  return pairs;
}

int count_present(const std::vector<double>& xs) {
  int n = 0;
  for (double x : xs) n += x >= 0.0;
  return n;
}

}  // namespace

Lane lane_from_curve(const BezierCurve& curve, const SampleGrid& grid, ImageSize size) {
  Lane lane = sample_curve(curve, grid);
  for (auto& p : lane) p = denormalize(p, size);
  return lane;
}

LaneMask rasterize_lane(const Lane& lane, double width, ImageSize size) {
  if (width < 1.0) throw std::invalid_argument(fmt::format("lane width must be >= 1, got {}", width));
  if (lane.size() < 2) {
    spdlog::warn("skipping lane with {} point(s); at least 2 are needed", lane.size());
    return LaneMask(size, {});
  }
  return stroke_polyline(lane, width, size);
}

double lane_iou(const Lane& a, const Lane& b, double width, ImageSize size) {
  return mask_iou(rasterize_lane(a, width, size), rasterize_lane(b, width, size));
}

void finalize_report(EvalReport& report) {
  const auto ratio = [](std::int64_t num, std::int64_t den) {
    return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
  };
  report.precision = ratio(report.tp, report.tp + report.fp);
  report.recall = ratio(report.tp, report.tp + report.fn);
  const double s = report.precision + report.recall;
  report.f1 = s > 0.0 ? 2.0 * report.precision * report.recall / s : 0.0;
}

ImageCounts evaluate_culane_image(const LaneSet& preds, const LaneSet& gts, const CulaneOptions& options) {
  ImageCounts c;
  const std::size_t np = preds.lanes.size();
  const std::size_t ng = gts.lanes.size();
  if (np == 0 || ng == 0) {
    c.fp = static_cast<std::int64_t>(np);
    c.fn = static_cast<std::int64_t>(ng);
    return c;
  }
  std::vector<LaneMask> pm;
  std::vector<LaneMask> gm;
  pm.reserve(np);
  gm.reserve(ng);
  for (const auto& l : preds.lanes) pm.push_back(rasterize_lane(l, options.lane_width, gts.image_size));
  for (const auto& l : gts.lanes) gm.push_back(rasterize_lane(l, options.lane_width, gts.image_size));

  // Weight = IoU plus a bonus larger than any IoU sum for pairs that pass the
  // threshold: the assignment maximizes the TP count first, then total IoU.
  const double bonus = static_cast<double>(std::min(np, ng)) + 1.0;
  WeightMatrix iou(ng, np);
  WeightMatrix score(ng, np);
  for (std::size_t g = 0; g < ng; ++g) {
    for (std::size_t p = 0; p < np; ++p) {
      iou(g, p) = mask_iou(gm[g], pm[p]);
      score(g, p) = iou(g, p) + (iou(g, p) >= options.iou_threshold ? bonus : 0.0);
    }
  }
  for (const auto& [g, p] : best_pairs(score)) c.tp += iou(g, p) >= options.iou_threshold;
  c.fp = static_cast<std::int64_t>(np) - c.tp;
  c.fn = static_cast<std::int64_t>(ng) - c.tp;
  return c;
}

EvalReport culane_f1(const std::map<std::string, LaneSet>& preds, const std::map<std::string, LaneSet>& gts,
                     const CulaneOptions& options) {
  EvalReport report;
  std::vector<const std::string*> keys;
  keys.reserve(gts.size());
  for (const auto& [key, set] : gts) keys.push_back(&key);
  for (const auto& [key, set] : preds) {
    if (!gts.contains(key)) report.unknown_prediction_keys.push_back(key);
  }

  report.per_image.resize(keys.size());
  const LaneSet no_preds;
  parallel_for(keys.size(), options.threads, [&](std::size_t i) {
    const auto& key = *keys[i];
    const auto it = preds.find(key);
    auto counts = evaluate_culane_image(it == preds.end() ? no_preds : it->second, gts.at(key), options);
    counts.key = key;
    report.per_image[i] = std::move(counts);
  });
  for (const auto* key : keys) {
    if (!preds.contains(*key)) report.missing_prediction_keys.push_back(*key);
  }
  for (const auto& c : report.per_image) {
    report.tp += c.tp;
    report.fp += c.fp;
    report.fn += c.fn;
  }
  finalize_report(report);
  if (report.tp + report.fp + report.fn == 0) spdlog::warn("evaluation contains no lanes; F1 reported as 0");
  return report;
}

TuSimpleCounts evaluate_tusimple_image(const RowLanes& preds, const RowLanes& gts, const TuSimpleOptions& options) {
  if (!preds.lanes.empty() && preds.h_samples != gts.h_samples) {
    throw std::invalid_argument("prediction and ground-truth row grids differ");
  }
  const std::size_t rows = gts.h_samples.size();
  for (const auto* set : {&preds, &gts}) {
    for (const auto& lane : set->lanes) {
      if (lane.size() != rows) {
        throw std::invalid_argument(fmt::format("lane has {} entries for a {}-row grid", lane.size(), rows));
      }
    }
  }
  std::vector<const std::vector<double>*> gt_lanes;
  for (const auto& lane : gts.lanes) {
    if (count_present(lane) > 0) gt_lanes.push_back(&lane);
  }

  TuSimpleCounts c;
  c.pred_lanes = static_cast<std::int64_t>(preds.lanes.size());
  c.gt_lanes = static_cast<std::int64_t>(gt_lanes.size());
  for (const auto* g : gt_lanes) c.gt_points += count_present(*g);
  if (gt_lanes.empty() || preds.lanes.empty()) return c;

  const std::size_t ng = gt_lanes.size();
  const std::size_t np = preds.lanes.size();
  WeightMatrix correct(ng, np);
  WeightMatrix score(ng, np);
  std::vector<char> passes(ng * np, 0);
  // Matched pairs dominate, then correct points.
  const double bonus = static_cast<double>(c.gt_points) + 1.0;
  for (std::size_t g = 0; g < ng; ++g) {
    const auto& gl = *gt_lanes[g];
    const int present = count_present(gl);
    for (std::size_t p = 0; p < np; ++p) {
      const auto& pl = preds.lanes[p];
      int hits = 0;
      for (std::size_t r = 0; r < rows; ++r) {
        if (gl[r] >= 0.0 && pl[r] >= 0.0 && std::abs(pl[r] - gl[r]) < options.point_threshold) ++hits;
      }
      correct(g, p) = hits;
      passes[g * np + p] = static_cast<double>(hits) / present >= options.match_fraction;
      score(g, p) = hits + (passes[g * np + p] ? bonus : 0.0);
    }
  }
  for (const auto& [g, p] : best_pairs(score)) {
    c.correct_points += static_cast<std::int64_t>(correct(g, p));
    c.matched += passes[g * np + p];
  }
  return c;
}

TuSimpleReport tusimple_metrics(const std::map<std::string, RowLanes>& preds,
                                const std::map<std::string, RowLanes>& gts, const TuSimpleOptions& options) {
  TuSimpleReport report;
  auto& c = report.counts;
  for (const auto& [key, gt] : gts) {
    const auto it = preds.find(key);
    const RowLanes empty{gt.h_samples, {}};
    const auto img = evaluate_tusimple_image(it == preds.end() ? empty : it->second, gt, options);
    c.correct_points += img.correct_points;
    c.gt_points += img.gt_points;
    c.matched += img.matched;
    c.pred_lanes += img.pred_lanes;
    c.gt_lanes += img.gt_lanes;
  }
  const auto ratio = [](std::int64_t num, std::int64_t den) {
    return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
  };
  report.accuracy = ratio(c.correct_points, c.gt_points);
  report.fp_rate = ratio(c.pred_lanes - c.matched, c.pred_lanes);
  report.fn_rate = ratio(c.gt_lanes - c.matched, c.gt_lanes);
  return report;
}

}  // namespace bezlane
