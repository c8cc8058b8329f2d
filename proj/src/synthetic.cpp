#include <bezlane/synthetic.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <random>

namespace bezlane {

std::vector<SyntheticImage> generate_synthetic(const SyntheticOptions& options) {
  std::mt19937_64 rng(options.seed);
  auto uniform = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto integer = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  std::vector<SyntheticImage> images;
  images.reserve(options.images);
  for (int k = 0; k < options.images; ++k) {
    SyntheticImage img;
    img.image_key = fmt::format("synthetic/{:06d}.jpg", k);
    const int count = integer(options.min_lanes, options.max_lanes);
    // Bottom positions spread across the image so lanes stay apart.
    const double slot = 0.8 / count;
    for (int l = 0; l < count; ++l) {
      const double bottom_x = 0.1 + slot * (l + uniform(0.2, 0.8));
      const double top_x = 0.5 + 0.25 * (bottom_x - 0.5) + uniform(-0.03, 0.03);
      const Point p0{bottom_x, uniform(0.92, 0.97)};
      const Point p3{top_x, uniform(0.42, 0.5)};
      const double bend = uniform(-0.06, 0.06);
      const Point p1 = p0 + (1.0 / 3.0) * (p3 - p0) + Point{bend + uniform(-0.02, 0.02), 0.0};
      const Point p2 = p0 + (2.0 / 3.0) * (p3 - p0) + Point{bend + uniform(-0.02, 0.02), 0.0};
      BezierCurve curve({p0, p1, p2, p3});

      const int m = integer(options.min_points, options.max_points);
      Lane lane;
      lane.reserve(m);
      for (int j = 0; j < m; ++j) {
        const Point on = curve.evaluate(static_cast<double>(j) / (m - 1));
        const Point noisy{on.x + uniform(-options.noise, options.noise), on.y + uniform(-options.noise, options.noise)};
        lane.push_back(denormalize(noisy, options.image_size));
      }
      img.curves.push_back(std::move(curve));
      img.lanes.push_back(std::move(lane));
    }
    images.push_back(std::move(img));
  }
  return images;
}

std::filesystem::path write_synthetic_culane(const std::vector<SyntheticImage>& images,
                                             const std::filesystem::path& dir) {
  std::string index;
  for (const auto& img : images) {
    write_text(culane_annotation_path(dir, img.image_key), format_culane(img.lanes));
    index += img.image_key + '\n';
  }
  const auto index_path = dir / "list.txt";
  write_text(index_path, index);
  return index_path;
}

std::string format_synthetic_labels(const std::vector<SyntheticImage>& images, ImageSize size) {
  std::vector<const SyntheticImage*> sorted;
  for (const auto& img : images) sorted.push_back(&img);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->image_key < b->image_key; });
  std::string out;
  for (const auto* img : sorted) {
    BezierLabel label{img->image_key, size, img->curves, {}, {}, {}};
    out += format_label(label) + '\n';
  }
  return out;
}

}  // namespace bezlane
