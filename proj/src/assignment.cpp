#include <bezlane/assignment.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bezlane {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest augmenting path Hungarian method with row/column potentials,
// minimizing cost over rows <= cols. Rows in `skip_row` and columns in
// `skip_col` are excluded. Returns the column of every active row.
std::vector<std::size_t> hungarian_min(const WeightMatrix& w, const std::vector<char>& skip_row,
                                       const std::vector<char>& skip_col) {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  for (std::size_t r = 0; r < w.rows(); ++r) {
    if (!skip_row[r]) rows.push_back(r);
  }
  for (std::size_t c = 0; c < w.cols(); ++c) {
    if (!skip_col[c]) cols.push_back(c);
  }
  const std::size_t n = rows.size();
  const std::size_t m = cols.size();
  std::vector<std::size_t> result(w.rows(), 0);
  if (n == 0) return result;

  auto cost = [&](std::size_t i, std::size_t j) { return -w(rows[i - 1], cols[j - 1]); };

  // 1-based arrays; index 0 is the virtual root.
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0);
  std::vector<std::size_t> way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) result[rows[p[j] - 1]] = cols[j - 1];
  }
  return result;
}

double sum_active(const WeightMatrix& w, const std::vector<std::size_t>& col_of_row,
                  const std::vector<char>& skip_row) {
  double s = 0.0;
  for (std::size_t r = 0; r < w.rows(); ++r) {
    if (!skip_row[r]) s += w(r, col_of_row[r]);
  }
  return s;
}

}  // namespace

Assignment solve_max_assignment(const WeightMatrix& weights) {
  const std::size_t g = weights.rows();
  const std::size_t n = weights.cols();
  if (g > n) {
    throw std::invalid_argument(fmt::format("assignment needs rows <= cols, got {} x {}", g, n));
  }
  for (double x : weights.data()) {
    if (!std::isfinite(x)) throw std::invalid_argument("assignment weights must be finite");
  }
  Assignment out;
  if (g == 0) return out;

  std::vector<char> fixed_row(g, 0);
  std::vector<char> used_col(n, 0);
  auto current = hungarian_min(weights, fixed_row, used_col);
  double remaining = sum_active(weights, current, fixed_row);
  const double tol = 1e-12 * std::max(1.0, std::abs(remaining));

  // Lexicographic pass: for each row in order, take the lowest column that
  // still admits an optimal completion of the remaining rows.
  for (std::size_t r = 0; r < g; ++r) {
    fixed_row[r] = 1;
    for (std::size_t c = 0; c < current[r]; ++c) {
      if (used_col[c]) continue;
      used_col[c] = 1;
      auto rest = hungarian_min(weights, fixed_row, used_col);
      const double value = weights(r, c) + sum_active(weights, rest, fixed_row);
      if (value >= remaining - tol) {
        for (std::size_t k = r + 1; k < g; ++k) current[k] = rest[k];
        current[r] = c;
        break;
      }
      used_col[c] = 0;
    }
    used_col[current[r]] = 1;
    remaining -= weights(r, current[r]);
  }

  out.column_of_row = std::move(current);
  for (std::size_t r = 0; r < g; ++r) out.total += weights(r, out.column_of_row[r]);
  return out;
}

}  // namespace bezlane
