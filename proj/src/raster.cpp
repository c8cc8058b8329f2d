#include <bezlane/raster.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace bezlane {

namespace {

// Boundary slack so pixels exactly at the stroke radius are kept despite
// rounding in the interval algebra.
constexpr double kEdgeSlack = 1e-9;

struct Interval {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  bool empty() const { return lo > hi; }
  void merge(double l, double h) {
    lo = std::min(lo, l);
    hi = std::max(hi, h);
  }
};

// Solution set of lo <= a*x + b <= hi as an x-interval.
bool linear_band(double a, double b, double lo, double hi, double& x_lo, double& x_hi) {
  if (std::abs(a) < 1e-15) {
    if (b < lo || b > hi) return false;
    x_lo = -std::numeric_limits<double>::infinity();
    x_hi = std::numeric_limits<double>::infinity();
    return true;
  }
  x_lo = (lo - b) / a;
  x_hi = (hi - b) / a;
  if (x_lo > x_hi) std::swap(x_lo, x_hi);
  return true;
}

// x-extent of the capsule {q : dist(q, [p0,p1]) <= r} on the line y = row.
Interval capsule_row(Point p0, Point p1, double r, double y) {
  Interval out;
  for (const Point& c : {p0, p1}) {
    const double dy = y - c.y;
    if (std::abs(dy) <= r) {
      const double h = std::sqrt(r * r - dy * dy);
      out.merge(c.x - h, c.x + h);
    }
  }
  const Point d = p1 - p0;
  const double len = norm(d);
  if (len > 0.0) {
    const double ux = d.x / len;
    const double uy = d.y / len;
    // Along-segment coordinate in [0, len], across-segment within [-r, r].
    double a_lo = 0.0;
    double a_hi = 0.0;
    double c_lo = 0.0;
    double c_hi = 0.0;
    const bool along = linear_band(ux, uy * (y - p0.y) - ux * p0.x, 0.0, len, a_lo, a_hi);
    const bool across = linear_band(-uy, ux * (y - p0.y) + uy * p0.x, -r, r, c_lo, c_hi);
    if (along && across) {
      const double lo = std::max(a_lo, c_lo);
      const double hi = std::min(a_hi, c_hi);
      if (lo <= hi) out.merge(lo, hi);
    }
  }
  return out;
}

}  // namespace

LaneMask::LaneMask(ImageSize size, std::vector<Span> spans) : size_(size), spans_(std::move(spans)) {}

std::int64_t LaneMask::area() const {
  std::int64_t a = 0;
  for (const auto& s : spans_) a += s.x1 - s.x0 + 1;
  return a;
}

bool LaneMask::contains(int x, int y) const {
  auto it = std::lower_bound(spans_.begin(), spans_.end(), y, [](const Span& s, int row) { return s.row < row; });
  for (; it != spans_.end() && it->row == y; ++it) {
    if (x >= it->x0 && x <= it->x1) return true;
  }
  return false;
}

std::vector<std::uint8_t> LaneMask::to_dense() const {
  std::vector<std::uint8_t> img(static_cast<std::size_t>(size_.height) * size_.width, 0);
  for (const auto& s : spans_) {
    std::fill_n(img.begin() + static_cast<std::ptrdiff_t>(s.row) * size_.width + s.x0, s.x1 - s.x0 + 1, 1);
  }
  return img;
}

LaneMask stroke_polyline(std::span<const Point> points, double width, ImageSize size) {
  if (points.size() < 2 || size.height <= 0 || size.width <= 0) return LaneMask(size, {});
  const double r = 0.5 * width + kEdgeSlack;
  std::vector<Span> raw;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const Point p0 = points[k];
    const Point p1 = points[k + 1];
    const int row_lo = std::max(0, static_cast<int>(std::ceil(std::min(p0.y, p1.y) - r)));
    const int row_hi = std::min(size.height - 1, static_cast<int>(std::floor(std::max(p0.y, p1.y) + r)));
    for (int row = row_lo; row <= row_hi; ++row) {
      const Interval iv = capsule_row(p0, p1, r, row);
      if (iv.empty()) continue;
      const double lo = std::max(std::ceil(iv.lo), 0.0);
      const double hi = std::min(std::floor(iv.hi), static_cast<double>(size.width - 1));
      if (lo <= hi) raw.push_back({row, static_cast<int>(lo), static_cast<int>(hi)});
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Span& a, const Span& b) {
    return a.row != b.row ? a.row < b.row : a.x0 < b.x0;
  });
  std::vector<Span> merged;
  merged.reserve(raw.size());
  for (const auto& s : raw) {
    if (!merged.empty() && merged.back().row == s.row && s.x0 <= merged.back().x1 + 1) {
      merged.back().x1 = std::max(merged.back().x1, s.x1);
    } else {
      merged.push_back(s);
    }
  }
  return LaneMask(size, std::move(merged));
}

std::int64_t intersection_area(const LaneMask& a, const LaneMask& b) {
  const auto& sa = a.spans();
  const auto& sb = b.spans();
  std::int64_t total = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < sa.size() && j < sb.size()) {
    if (sa[i].row != sb[j].row) {
      (sa[i].row < sb[j].row ? i : j)++;
      continue;
    }
    const int lo = std::max(sa[i].x0, sb[j].x0);
    const int hi = std::min(sa[i].x1, sb[j].x1);
    if (lo <= hi) total += hi - lo + 1;
    (sa[i].x1 < sb[j].x1 ? i : j)++;
  }
  return total;
}

double mask_iou(const LaneMask& a, const LaneMask& b) {
  const std::int64_t inter = intersection_area(a, b);
  const std::int64_t uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

}  // namespace bezlane
