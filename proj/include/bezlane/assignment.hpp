#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace bezlane {

/// Dense row-major matrix of assignment weights.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Column chosen for each row; all columns distinct.
struct Assignment {
  std::vector<std::size_t> column_of_row;
  /// Sum of weights over the chosen pairs, accumulated in row order.
  double total = 0.0;
};

/// Maximum-total-weight assignment of every row to a distinct column
/// (Hungarian method on negated weights, rows <= cols). Among optimal
/// assignments, returns the lexicographically smallest column sequence.
/// Throws std::invalid_argument if rows > cols or any entry is not finite.
Assignment solve_max_assignment(const WeightMatrix& weights);

}  // namespace bezlane
