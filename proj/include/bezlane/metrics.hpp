#pragma once

#include <bezlane/bezier.hpp>
#include <bezlane/geometry.hpp>
#include <bezlane/raster.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bezlane {

inline constexpr double kDefaultLaneWidth = 30.0;
inline constexpr double kDefaultIouThreshold = 0.5;
inline constexpr double kDefaultPointThreshold = 20.0;
inline constexpr double kDefaultMatchFraction = 0.85;

/// Lane as pixel-coordinate points.
using Lane = std::vector<Point>;

struct LaneSet {
  std::vector<Lane> lanes;
  ImageSize image_size;
};

/// Samples a normalized-coordinate curve and scales it to pixels.
Lane lane_from_curve(const BezierCurve& curve, const SampleGrid& grid, ImageSize size);

/// Round-capped stroke of the lane; lanes with fewer than two points are
/// skipped with a warning and give an empty mask.
LaneMask rasterize_lane(const Lane& lane, double width, ImageSize size);

double lane_iou(const Lane& a, const Lane& b, double width, ImageSize size);

struct ImageCounts {
  std::string key;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
};

struct EvalReport {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<ImageCounts> per_image;
  /// Keys present in predictions but not in ground truth.
  std::vector<std::string> unknown_prediction_keys;
  /// Ground-truth keys with no prediction entry (scored as zero predictions).
  std::vector<std::string> missing_prediction_keys;
};

/// Fills precision/recall/F1 from the counters (0/0 -> 0).
void finalize_report(EvalReport& report);

struct CulaneOptions {
  double iou_threshold = kDefaultIouThreshold;
  double lane_width = kDefaultLaneWidth;
  int threads = 1;
};

/// TP/FP/FN for one image: one-to-one assignment maximizing the number of
/// pairs with IoU >= threshold, then total IoU.
ImageCounts evaluate_culane_image(const LaneSet& preds, const LaneSet& gts, const CulaneOptions& options);

/// Dataset-level F1 over all ground-truth keys. Per-image rows in key order.
EvalReport culane_f1(const std::map<std::string, LaneSet>& preds, const std::map<std::string, LaneSet>& gts,
                     const CulaneOptions& options = {});

/// Lanes as x-coordinates on a shared row grid; negative x marks a missing point.
struct RowLanes {
  std::vector<double> h_samples;
  std::vector<std::vector<double>> lanes;
};

struct TuSimpleOptions {
  double point_threshold = kDefaultPointThreshold;
  double match_fraction = kDefaultMatchFraction;
};

struct TuSimpleCounts {
  std::int64_t correct_points = 0;
  std::int64_t gt_points = 0;
  std::int64_t matched = 0;
  std::int64_t pred_lanes = 0;
  std::int64_t gt_lanes = 0;
};

struct TuSimpleReport {
  TuSimpleCounts counts;
  double accuracy = 0.0;
  double fp_rate = 0.0;
  double fn_rate = 0.0;
};

/// Throws std::invalid_argument when the row grids differ or a lane's length
/// does not match its grid.
TuSimpleCounts evaluate_tusimple_image(const RowLanes& preds, const RowLanes& gts, const TuSimpleOptions& options);

TuSimpleReport tusimple_metrics(const std::map<std::string, RowLanes>& preds,
                                const std::map<std::string, RowLanes>& gts, const TuSimpleOptions& options = {});

}  // namespace bezlane
