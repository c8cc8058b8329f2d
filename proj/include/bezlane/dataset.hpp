#pragma once

#include <bezlane/bezier.hpp>
#include <bezlane/geometry.hpp>
#include <bezlane/metrics.hpp>

#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace bezlane {

inline constexpr ImageSize kCulaneImageSize{590, 1640};
inline constexpr ImageSize kTusimpleImageSize{720, 1280};
inline constexpr double kTusimpleAbsent = -2.0;

/// Annotated lanes of one image, pixel coordinates.
struct AnnotationRecord {
  std::string image_key;
  std::vector<Lane> lanes;
  ImageSize image_size;
};

/// True when every point lies within [-0.5, 1.5] x image size.
bool within_guard_band(const Lane& lane, ImageSize size);

/// One lane per line, whitespace-separated alternating x y pixel values.
/// Lanes with fewer than two points are dropped with a warning. Throws
/// ParseError (1-based line number) on odd token counts or bad numbers.
std::vector<Lane> parse_culane(std::string_view text);

/// Inverse of parse_culane; 4 decimals.
std::string format_culane(const std::vector<Lane>& lanes);

/// Annotation path for an image key: the extension is replaced by
/// ".lines.txt" (appended when there is none).
std::filesystem::path culane_annotation_path(const std::filesystem::path& root, const std::string& image_key);

/// Reads and parses one image's annotation. Throws IoError or ParseError.
AnnotationRecord read_culane_annotation(const std::filesystem::path& root, const std::string& image_key,
                                        ImageSize size);

/// Non-empty, non-comment lines of a text file, trimmed. Throws IoError.
std::vector<std::string> read_lines(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);

/// Writes atomically enough for batch use (truncate + write). Throws IoError.
void write_text(const std::filesystem::path& path, std::string_view text);

/// One TuSimple-style record: x rows over a shared y grid.
struct TuSimpleRecord {
  std::string raw_file;
  RowLanes rows;
};

/// Throws ParseError (byte offset) on malformed JSON and SchemaError on
/// missing fields or lanes whose length differs from h_samples.
TuSimpleRecord parse_tusimple_record(std::string_view json_line);

std::string format_tusimple_record(const TuSimpleRecord& record);

/// Row lanes as pixel polylines, absent entries skipped; lanes left with
/// fewer than two points are dropped.
std::vector<Lane> rows_to_lanes(const RowLanes& rows);

/// x where the polyline first crosses each row (linear interpolation), or
/// the absent sentinel.
std::vector<double> lane_to_row(const Lane& lane, const std::vector<double>& h_samples);

AnnotationRecord parse_tusimple(std::string_view json_line, ImageSize size = kTusimpleImageSize);

/// Fitted cubic curves of one image in normalized coordinates. The same
/// record carries per-curve class scores (and optionally a logit row) when
/// used as a prediction file.
struct BezierLabel {
  std::string image_key;
  ImageSize image_size;
  std::vector<BezierCurve> curves;
  std::vector<double> fit_residual;
  std::vector<double> scores;
  std::vector<double> logits;
};

/// JSON line; control points rounded to 6 decimals, residuals to 6
/// significant digits.
std::string format_label(const BezierLabel& label);

/// Throws ParseError (byte offset) or SchemaError.
BezierLabel parse_label(std::string_view json_line);

struct LabelResult {
  BezierLabel label;
  /// One message per lane that could not be fitted.
  std::vector<std::string> lane_errors;
};

/// Normalizes each lane by the image size and fits it with least squares.
/// A failing lane is reported and skipped; the rest of the image survives.
LabelResult generate_labels(const AnnotationRecord& record, int order = kDefaultOrder,
                            const FitOptions& options = {});

/// Affine map in normalized coordinates, optionally preceded by a horizontal
/// flip about x = 0.5.
struct Augmentation {
  AffineTransform transform;
  bool flip = false;

  AffineTransform combined() const;
};

/// Transforms every curve, clips it to `box`, and drops curves with no
/// in-box part. Residuals, scores and logits follow their surviving curves.
BezierLabel augment_labels(const BezierLabel& label, const Augmentation& augmentation, const Box& box = Box::unit());

/// Conjugates a pixel-space affine map into normalized coordinates.
AffineTransform pixel_to_normalized(const AffineTransform& pixel, ImageSize size);

/// Bounds of the random affine policy, in degrees / pixels / fraction.
struct RandomAffineSpec {
  double max_rotation_deg = 10.0;
  double max_translate_x = 50.0;
  double max_translate_y = 20.0;
  double max_scale = 0.2;
  double flip_probability = 0.5;

  /// Throws std::invalid_argument for negative bounds, scale >= 1, or a
  /// probability outside [0,1].
  void validate() const;
};

/// Draws rotation and scale about the image center, then translation.
Augmentation sample_augmentation(const RandomAffineSpec& spec, ImageSize size, std::mt19937_64& rng);

/// Stable per-key seed so a random stream does not depend on processing order.
std::uint64_t key_seed(std::uint64_t seed, std::string_view key);

}  // namespace bezlane
