#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdcluster/error.hpp"

namespace sdclust {

/// Ascending SD integrates the CDF from the left tail (risk averters);
/// descending integrates from the right tail (risk seekers).
enum class Direction { Ascending, Descending };

std::string_view to_string(Direction d) noexcept;
/// Accepts "asc"/"ascending"/"desc"/"descending" (case-sensitive).
Direction parse_direction(std::string_view text);

/// Dominance order j. Only 1..3 are supported.
class SdOrder {
 public:
  constexpr explicit SdOrder(int j) : j_(j) {
    if (j < 1 || j > 3) throw ConfigError("stochastic dominance order must be 1, 2 or 3");
  }
  constexpr int value() const noexcept { return j_; }
  friend constexpr bool operator==(SdOrder, SdOrder) = default;

 private:
  int j_;
};

using Series = std::vector<double>;
using SeriesView = std::span<const double>;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace sdclust
