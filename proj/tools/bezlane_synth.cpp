// Writes a synthetic lane dataset: CULane-style annotations with an index
// file, plus the generating curves as a label file.
#include <bezlane/cli.hpp>
#include <bezlane/synthetic.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

int main(int argc, char** argv) {
  bezlane::SyntheticOptions options;
  std::string dir;
  CLI::App app{"Generate synthetic cubic lane annotations", "bezlane-synth"};
  app.add_option("--output-dir", dir, "Destination directory")->required();
  app.add_option("--images", options.images, "Number of images")->capture_default_str()->check(CLI::NonNegativeNumber);
  app.add_option("--min-lanes", options.min_lanes, "Fewest lanes per image")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--max-lanes", options.max_lanes, "Most lanes per image")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--min-points", options.min_points, "Fewest annotation points per lane")->capture_default_str()->check(CLI::Range(2, 10000));
  app.add_option("--max-points", options.max_points, "Most annotation points per lane")->capture_default_str()->check(CLI::Range(2, 10000));
  app.add_option("--noise", options.noise, "Uniform noise half-width, normalized units")->capture_default_str()->check(CLI::NonNegativeNumber);
  app.add_option("--seed", options.seed, "Random seed")->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bezlane::cli::kExitConfig;
  }
  if (options.min_lanes > options.max_lanes || options.min_points > options.max_points) {
    std::cerr << "error: minimum exceeds maximum\n";
    return bezlane::cli::kExitConfig;
  }
  try {
    const auto images = bezlane::generate_synthetic(options);
    const auto index = bezlane::write_synthetic_culane(images, dir);
    bezlane::write_text(std::filesystem::path(dir) / "curves.jsonl",
                        bezlane::format_synthetic_labels(images, options.image_size));
    std::cout << fmt::format("wrote {} images to {}\n", images.size(), index.string());
  } catch (const std::exception& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return bezlane::cli::kExitIo;
  }
  return 0;
}
