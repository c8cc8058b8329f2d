#pragma once

#include <bezlane/bezier.hpp>
#include <bezlane/dataset.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bezlane {

/// Road-like random cubic lanes with noisy keypoint annotations.
struct SyntheticOptions {
  int images = 1000;
  int min_lanes = 2;
  int max_lanes = 4;
  int min_points = 10;
  int max_points = 40;
  /// Half-width of the uniform noise added to each normalized coordinate.
  double noise = 0.001;
  ImageSize image_size = kCulaneImageSize;
  std::uint64_t seed = 1;
};

struct SyntheticImage {
  std::string image_key;
  /// Generating curves, normalized coordinates.
  std::vector<BezierCurve> curves;
  /// Keypoint annotations in pixels, sampled at uniform t plus noise.
  std::vector<Lane> lanes;
};

std::vector<SyntheticImage> generate_synthetic(const SyntheticOptions& options);

/// Writes `<dir>/<key stem>.lines.txt` per image plus `<dir>/list.txt`
/// holding the keys. Returns the index path.
std::filesystem::path write_synthetic_culane(const std::vector<SyntheticImage>& images,
                                             const std::filesystem::path& dir);

/// Generating curves as a label file (no residuals), sorted by key.
std::string format_synthetic_labels(const std::vector<SyntheticImage>& images, ImageSize size);

}  // namespace bezlane
