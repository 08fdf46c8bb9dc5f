#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sdcluster/types.hpp"

namespace sdclust {

/// Observation sample (log returns). At least two finite values.
class Sample {
 public:
  explicit Sample(Series values);
  SeriesView values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }

 private:
  Series values_;
  double min_;
  double max_;
};

/// Strictly increasing abscissae, at least two.
class Grid {
 public:
  explicit Grid(std::vector<double> points);
  std::span<const double> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  /// The grid without its first and last point.
  std::span<const double> interior() const noexcept {
    return points_.size() > 2 ? std::span<const double>(points_).subspan(1, points_.size() - 2)
                              : std::span<const double>{};
  }

 private:
  std::vector<double> points_;
};

inline constexpr double kDefaultVarFloor = 1e-12;
inline constexpr std::size_t kDefaultGridPoints = 100;

/// Empirical j-th order SD integral at x:
///   ascending  (1/(N (j-1)!)) sum (x - h_i)_+^{j-1}
///   descending (1/(N (j-1)!)) sum (h_i - x)_+^{j-1}
/// with the zeroth power read as the indicator h_i <= x (resp. h_i >= x).
double sd_integral(SeriesView sample, double x, SdOrder j, Direction dir);

/// Sampling variance estimate of sd_integral at x, clamped at zero.
double sd_variance(SeriesView sample, double x, SdOrder j, Direction dir);

/// T_j(x) = (F_j(x) - G_j(x)) / sqrt(V_F(x) + V_G(x)) over a grid. Points with
/// pooled variance at or below the floor are left undefined.
struct StatProfile {
  SdOrder order{1};
  Direction direction = Direction::Ascending;
  std::vector<std::optional<double>> t_values;
  double max = 0.0;
  double min = 0.0;
  double max_abs = 0.0;

  std::size_t defined_count() const noexcept;
};

/// Throws NumericalError when no grid point has variance above `var_floor`.
StatProfile stat_profile(SeriesView f, SeriesView g, std::span<const double> grid, SdOrder j,
                         Direction dir, double var_floor = kDefaultVarFloor);
StatProfile stat_profile(const Sample& f, const Sample& g, const Grid& grid, SdOrder j,
                         Direction dir, double var_floor = kDefaultVarFloor);

/// `points` equally spaced values spanning [lo, hi], endpoints exact.
/// Throws NumericalError when lo == hi, ConfigError when points < 2.
Grid make_grid(double lo, double hi, std::size_t points);
/// Grid over the pooled range of both samples.
Grid make_grid(const Sample& f, const Sample& g, std::size_t points);

}  // namespace sdclust
