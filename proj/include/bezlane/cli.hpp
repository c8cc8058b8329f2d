#pragma once

#include <bezlane/dataset.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bezlane::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitIo = 3,
  kExitValidation = 4,
};

/// Bad flag values or inconsistent options.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data that is readable but violates a contract (scores outside
/// [0,1], too many failed images, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string subcommand;

  // I/O
  std::string input;
  std::string output;
  std::string gt;
  std::string pred;
  std::string report;
  std::string root;
  std::string input_format = "auto";
  std::string gt_format = "auto";
  std::string pred_format = "auto";
  /// 0 selects the input format's native size (CULane 590x1640, TuSimple
  /// 720x1280). Label files carry their own size.
  int image_height = 0;
  int image_width = 0;

  // Curves and losses
  int order = kDefaultOrder;
  int sample_count = kDefaultSampleCount;
  std::string param = "chord";
  double alpha = 0.8;
  double neg_weight = 0.4;
  std::array<double, 3> lambdas{1.0, 0.1, 0.75};
  bool local_max = false;
  std::optional<double> cls_loss;
  double seg_loss = 0.0;

  // Evaluation
  std::string metric = "culane";
  double iou_threshold = 0.5;
  double lane_width_px = 30.0;
  double point_threshold_px = 20.0;
  double match_fraction = 0.85;
  bool per_image = false;

  // Augmentation
  RandomAffineSpec augment;

  // Sampling dump
  bool pixels = false;

  int parallelism = 1;
  std::uint64_t seed = 0;

  /// Throws ConfigError.
  void validate() const;

  /// Resolved settings echoed into reports. Parallelism is left out: it never
  /// changes results, and reports must not differ across worker counts.
  std::vector<std::pair<std::string, std::string>> describe() const;

  ImageSize image_size(ImageSize fallback) const {
    return image_height > 0 ? ImageSize{image_height, image_width} : fallback;
  }
};

int run_fit(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_eval(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_match(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_augment(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_sample(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Dispatches on config.subcommand, mapping exceptions to exit codes.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses flags (plus optional --config file and BEZLANE_* environment
/// variables) and runs the chosen subcommand.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bezlane::cli
