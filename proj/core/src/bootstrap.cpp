#include "sdcluster/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "profile_kernel.hpp"
#include "sdcluster/digest.hpp"

namespace sdclust {

void BootstrapConfig::validate() const {
  if (reps < 1) throw ConfigError("bootstrap reps must be at least 1");
  if (grid_points < 2) throw ConfigError("grid_points must be at least 2");
  if (!(var_floor > 0.0)) throw ConfigError("var_floor must be positive");
}

std::vector<double> statistic_grid(double lo, double hi, std::size_t points) {
  const Grid full = make_grid(lo, hi, points + 2);
  const auto inner = full.interior();
  return {inner.begin(), inner.end()};
}

namespace {

std::vector<double> sorted_pool(SeriesView f, SeriesView g) {
  std::vector<double> pool(f.begin(), f.end());
  pool.insert(pool.end(), g.begin(), g.end());
  std::sort(pool.begin(), pool.end());
  return pool;
}

// True when g should take the first resampling role. Canonical order is
// (size, sorted values) so pair_test(f, g) and pair_test(g, f) draw the same
// resamples for the same roles.
bool swap_roles(SeriesView f, SeriesView g) {
  if (f.size() != g.size()) return g.size() < f.size();
  std::vector<double> sf(f.begin(), f.end());
  std::vector<double> sg(g.begin(), g.end());
  std::sort(sf.begin(), sf.end());
  std::sort(sg.begin(), sg.end());
  return std::lexicographical_compare(sg.begin(), sg.end(), sf.begin(), sf.end());
}

void check_samples(SeriesView f, SeriesView g) {
  if (f.empty() || g.empty()) throw DataError("bootstrap needs non-empty samples");
  for (double v : f)
    if (!std::isfinite(v)) throw DataError("sample contains a non-finite value");
  for (double v : g)
    if (!std::isfinite(v)) throw DataError("sample contains a non-finite value");
}

}  // namespace

std::pair<Series, Series> pooled_resample(SeriesView f, SeriesView g, Rng& rng) {
  const auto pool = sorted_pool(f, g);
  std::pair<Series, Series> out;
  out.first.reserve(f.size());
  out.second.reserve(g.size());
  for (std::size_t i = 0; i < f.size(); ++i) out.first.push_back(pool[uniform_index(rng, pool.size())]);
  for (std::size_t i = 0; i < g.size(); ++i) out.second.push_back(pool[uniform_index(rng, pool.size())]);
  return out;
}

BootStat boot_stat(SeriesView f_star, SeriesView g_star, const BootstrapConfig& cfg) {
  cfg.validate();
  const auto support = detail::make_support(f_star, g_star);
  const double lo = support.values.front();
  const double hi = support.values.back();
  if (!(lo < hi)) return {0.0, true};
  const auto grid = statistic_grid(lo, hi, cfg.grid_points);
  const auto s = detail::evaluate_profile(support, grid, cfg.order, cfg.direction, cfg.var_floor);
  if (s.defined == 0) return {0.0, true};
  return {s.max_abs, false};
}

std::vector<ReplicateExtremes> bootstrap_replicates(SeriesView f, SeriesView g,
                                                    const BootstrapConfig& cfg) {
  cfg.validate();
  check_samples(f, g);
  const bool swapped = swap_roles(f, g);
  const SeriesView first = swapped ? g : f;
  const SeriesView second = swapped ? f : g;

  const auto pool = sorted_pool(f, g);
  std::vector<double> distinct;
  std::vector<std::size_t> slot(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (distinct.empty() || distinct.back() != pool[i]) distinct.push_back(pool[i]);
    slot[i] = distinct.size() - 1;
  }

  const auto nf = static_cast<std::int64_t>(f.size());
  const auto ng = static_cast<std::int64_t>(g.size());
  std::vector<std::int64_t> first_counts(distinct.size());
  std::vector<std::int64_t> second_counts(distinct.size());
  std::vector<ReplicateExtremes> out(cfg.reps);

  for (std::size_t k = 0; k < cfg.reps; ++k) {
    Rng rng(derive_seed(cfg.seed, {k}));
    std::fill(first_counts.begin(), first_counts.end(), 0);
    std::fill(second_counts.begin(), second_counts.end(), 0);
    for (std::size_t i = 0; i < first.size(); ++i) ++first_counts[slot[uniform_index(rng, pool.size())]];
    for (std::size_t i = 0; i < second.size(); ++i) ++second_counts[slot[uniform_index(rng, pool.size())]];

    std::size_t lo = 0;
    while (first_counts[lo] + second_counts[lo] == 0) ++lo;
    std::size_t hi = distinct.size() - 1;
    while (first_counts[hi] + second_counts[hi] == 0) --hi;
    if (lo == hi) {
      out[k].degenerate = true;
      continue;
    }
    const auto grid = statistic_grid(distinct[lo], distinct[hi], cfg.grid_points);
    const auto& fc = swapped ? second_counts : first_counts;
    const auto& gc = swapped ? first_counts : second_counts;
    const auto s = detail::evaluate_profile(distinct, fc, gc, nf, ng, grid, cfg.order, cfg.direction,
                                            cfg.var_floor);
    if (s.defined == 0) {
      out[k].degenerate = true;
      continue;
    }
    out[k] = {s.max_abs, s.max, s.min, false};
  }
  return out;
}

PairTestResult pair_test(SeriesView f, SeriesView g, const BootstrapConfig& cfg, bool keep_boot_stats) {
  cfg.validate();
  check_samples(f, g);
  const auto [fmin, fmax] = std::minmax_element(f.begin(), f.end());
  const auto [gmin, gmax] = std::minmax_element(g.begin(), g.end());
  const double lo = std::min(*fmin, *gmin);
  const double hi = std::max(*fmax, *gmax);
  if (!(lo < hi)) throw NumericalError("pair test undefined: both samples are the same constant");

  PairTestResult result;
  result.profile = stat_profile(f, g, statistic_grid(lo, hi, cfg.grid_points), cfg.order,
                                cfg.direction, cfg.var_floor);
  result.t0_max_abs = result.profile.max_abs;
  result.reps = cfg.reps;

  const auto reps = bootstrap_replicates(f, g, cfg);
  std::size_t exceed = 0;
  if (keep_boot_stats) result.boot_stats.reserve(reps.size());
  for (const auto& r : reps) {
    if (r.max_abs >= result.t0_max_abs) ++exceed;
    if (r.degenerate) ++result.degenerate_resamples;
    if (keep_boot_stats) result.boot_stats.push_back(r.max_abs);
  }
  result.p_value = static_cast<double>(exceed) / static_cast<double>(cfg.reps);
  result.coefficient = 1.0 - result.p_value;
  return result;
}

double critical_value(std::span<const double> boot_stats, double alpha) {
  if (boot_stats.empty()) throw ConfigError("critical_value needs at least one statistic");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  const auto b = static_cast<double>(boot_stats.size());
  const auto exceed = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(b * alpha + 1e-9)));
  std::vector<double> sorted(boot_stats.begin(), boot_stats.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return sorted[exceed - 1];
}

}  // namespace sdclust
