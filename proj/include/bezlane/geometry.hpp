#pragma once

#include <array>
#include <cmath>

namespace bezlane {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
  friend constexpr bool operator==(Point a, Point b) = default;
};

inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

/// Image dimensions in pixels.
struct ImageSize {
  int height = 0;
  int width = 0;

  friend constexpr bool operator==(ImageSize, ImageSize) = default;
};

inline Point normalize(Point pixel, ImageSize size) {
  return {pixel.x / size.width, pixel.y / size.height};
}

inline Point denormalize(Point unit, ImageSize size) {
  return {unit.x * size.width, unit.y * size.height};
}

/// Closed axis-aligned rectangle.
struct Box {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 1.0;
  double y_max = 1.0;

  bool contains(Point p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  bool degenerate() const { return !(x_max > x_min && y_max > y_min); }

  static constexpr Box unit() { return {0.0, 0.0, 1.0, 1.0}; }
};

/// 2x3 affine map  [x', y'] = [[a b c] [d e f]] * [x y 1].
struct AffineTransform {
  std::array<double, 6> m{1.0, 0.0, 0.0, 0.0, 1.0, 0.0};

  Point apply(Point p) const {
    return {m[0] * p.x + m[1] * p.y + m[2], m[3] * p.x + m[4] * p.y + m[5]};
  }

  /// (*this)(other(p)): applies `other` first.
  AffineTransform after(const AffineTransform& other) const {
    const auto& o = other.m;
    return {{m[0] * o[0] + m[1] * o[3], m[0] * o[1] + m[1] * o[4], m[0] * o[2] + m[1] * o[5] + m[2],
             m[3] * o[0] + m[4] * o[3], m[3] * o[1] + m[4] * o[4], m[3] * o[2] + m[4] * o[5] + m[5]}};
  }

  bool finite() const {
    for (double v : m) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
  bool is_identity() const { return m == std::array<double, 6>{1.0, 0.0, 0.0, 0.0, 1.0, 0.0}; }

  static AffineTransform identity() { return {}; }
  static AffineTransform translation(double dx, double dy) { return {{1.0, 0.0, dx, 0.0, 1.0, dy}}; }
  static AffineTransform scaling(double sx, double sy) { return {{sx, 0.0, 0.0, 0.0, sy, 0.0}}; }
  /// Counterclockwise rotation (in a y-up frame) by `radians` about `center`.
  static AffineTransform rotation(double radians, Point center) {
    const double c = std::cos(radians);
    const double s = std::sin(radians);
    return {{c, -s, center.x - c * center.x + s * center.y, s, c, center.y - s * center.x - c * center.y}};
  }
  /// Mirror about the vertical line x = axis_x.
  static AffineTransform horizontal_flip(double axis_x) { return {{-1.0, 0.0, 2.0 * axis_x, 0.0, 1.0, 0.0}}; }
};

}  // namespace bezlane
