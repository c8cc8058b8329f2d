#pragma once

#include <bezlane/geometry.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace bezlane {

/// Horizontal run of set pixels [x0, x1] on one row, inclusive.
struct Span {
  int row = 0;
  int x0 = 0;
  int x1 = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

/// Binary mask stored as sorted, non-overlapping row spans.
class LaneMask {
 public:
  LaneMask() = default;
  LaneMask(ImageSize size, std::vector<Span> spans);

  ImageSize size() const { return size_; }
  const std::vector<Span>& spans() const { return spans_; }
  bool empty() const { return spans_.empty(); }
  std::int64_t area() const;
  bool contains(int x, int y) const;
  /// Row-major 0/1 image, mainly for inspection and tests.
  std::vector<std::uint8_t> to_dense() const;

  friend bool operator==(const LaneMask&, const LaneMask&) = default;

 private:
  ImageSize size_;
  std::vector<Span> spans_;
};

/// Pixels (c, r) within `width / 2` Euclidean distance of the polyline through
/// `points` (pixel coordinates), i.e. a round-capped stroke. Fewer than two
/// points yields an empty mask.
LaneMask stroke_polyline(std::span<const Point> points, double width, ImageSize size);

std::int64_t intersection_area(const LaneMask& a, const LaneMask& b);

/// |A ∩ B| / |A ∪ B|; 0 when both are empty.
double mask_iou(const LaneMask& a, const LaneMask& b);

}  // namespace bezlane
