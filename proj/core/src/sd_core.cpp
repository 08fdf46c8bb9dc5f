#include "sdcluster/sd_core.hpp"

#include <algorithm>
#include <cmath>

#include "profile_kernel.hpp"

namespace sdclust {

std::string_view to_string(Direction d) noexcept {
  return d == Direction::Ascending ? "asc" : "desc";
}

Direction parse_direction(std::string_view text) {
  if (text == "asc" || text == "ascending") return Direction::Ascending;
  if (text == "desc" || text == "descending") return Direction::Descending;
  throw ConfigError("direction must be 'asc' or 'desc', got '" + std::string(text) + "'");
}

Sample::Sample(Series values) : values_(std::move(values)) {
  if (values_.size() < 2) throw DataError("a sample needs at least 2 observations");
  for (double v : values_)
    if (!std::isfinite(v)) throw DataError("sample contains a non-finite value");
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  min_ = *lo;
  max_ = *hi;
}

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw ConfigError("a grid needs at least 2 points");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i - 1] < points_[i])) throw ConfigError("grid points must be strictly increasing");
  }
}

namespace {

constexpr double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// (d)_+^p with the zeroth power read as an indicator of d >= 0.
double positive_power(double d, int p) {
  if (d < 0.0) return 0.0;
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= d;
  return r;
}

double signed_gap(double x, double h, Direction dir) { return dir == Direction::Ascending ? x - h : h - x; }

}  // namespace

double sd_integral(SeriesView sample, double x, SdOrder j, Direction dir) {
  const int p = j.value() - 1;
  double sum = 0.0;
  for (double h : sample) sum += positive_power(signed_gap(x, h, dir), p);
  return sum / (static_cast<double>(sample.size()) * factorial(p));
}

double sd_variance(SeriesView sample, double x, SdOrder j, Direction dir) {
  const int p = j.value() - 1;
  const double n = static_cast<double>(sample.size());
  const double f = factorial(p);
  double sum2 = 0.0;
  for (double h : sample) sum2 += positive_power(signed_gap(x, h, dir), 2 * p);
  const double hj = sd_integral(sample, x, j, dir);
  return std::max(0.0, (sum2 / (n * f * f) - hj * hj) / n);
}

std::size_t StatProfile::defined_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(t_values.begin(), t_values.end(),
                                                [](const auto& t) { return t.has_value(); }));
}

StatProfile stat_profile(SeriesView f, SeriesView g, std::span<const double> grid, SdOrder j,
                         Direction dir, double var_floor) {
  if (grid.empty()) throw ConfigError("stat_profile needs a non-empty grid");
  if (!(var_floor > 0.0)) throw ConfigError("var_floor must be positive");
  if (f.empty() || g.empty()) throw DataError("stat_profile needs non-empty samples");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i - 1] < grid[i])) throw ConfigError("grid points must be strictly increasing");
  }
  const auto support = detail::make_support(f, g);
  StatProfile profile;
  profile.order = j;
  profile.direction = dir;
  const auto summary = detail::evaluate_profile(support, grid, j, dir, var_floor, &profile.t_values);
  if (summary.defined == 0) {
    throw NumericalError("test statistic undefined at every grid point (zero variance)");
  }
  profile.max = summary.max;
  profile.min = summary.min;
  profile.max_abs = summary.max_abs;
  return profile;
}

StatProfile stat_profile(const Sample& f, const Sample& g, const Grid& grid, SdOrder j, Direction dir,
                         double var_floor) {
  return stat_profile(f.values(), g.values(), grid.points(), j, dir, var_floor);
}

Grid make_grid(double lo, double hi, std::size_t points) {
  if (points < 2) throw ConfigError("grid needs at least 2 points");
  if (!(lo < hi)) throw NumericalError("degenerate pooled range: min equals max");
  std::vector<double> xs(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) xs[i] = lo + step * static_cast<double>(i);
  xs.back() = hi;
  return Grid(std::move(xs));
}

Grid make_grid(const Sample& f, const Sample& g, std::size_t points) {
  return make_grid(std::min(f.min(), g.min()), std::max(f.max(), g.max()), points);
}

}  // namespace sdclust
