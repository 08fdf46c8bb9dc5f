#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "sdcluster/rng.hpp"
#include "sdcluster/sd_core.hpp"

namespace sdclust {

struct BootstrapConfig {
  std::size_t reps = 1000;
  std::uint64_t seed = 0;
  /// Number of evaluation points strictly inside the pooled sample range.
  std::size_t grid_points = kDefaultGridPoints;
  double var_floor = kDefaultVarFloor;
  SdOrder order{1};
  Direction direction = Direction::Ascending;

  /// Throws ConfigError on reps == 0, grid_points < 2 or a non-positive floor.
  void validate() const;
  BootstrapConfig with_seed(std::uint64_t s) const {
    BootstrapConfig c = *this;
    c.seed = s;
    return c;
  }
};

/// Grid used by the test statistic for a pooled range [lo, hi]: `points`
/// equally spaced abscissae in the open interval (lo, hi).
std::vector<double> statistic_grid(double lo, double hi, std::size_t points);

/// Draws N_f and then N_g values i.i.d. with replacement from the pooled
/// multiset f ∪ g. The pool is taken in sorted order so the draw sequence
/// depends only on the multiset, not on how f and g were laid out.
std::pair<Series, Series> pooled_resample(SeriesView f, SeriesView g, Rng& rng);

struct BootStat {
  double value = 0.0;
  bool degenerate = false;
};

/// max |T_j| over the statistic grid rebuilt on the resample's pooled range.
/// A resample with no defined grid point (or a single pooled value) yields 0
/// and is flagged degenerate.
BootStat boot_stat(SeriesView f_star, SeriesView g_star, const BootstrapConfig& cfg);

/// Per-replication extremes of the resampled profile.
struct ReplicateExtremes {
  double max_abs = 0.0;
  double max = 0.0;
  double min = 0.0;
  bool degenerate = false;
};

struct PairTestResult {
  double t0_max_abs = 0.0;
  double p_value = 1.0;
  double coefficient = 0.0;
  std::size_t reps = 0;
  std::size_t degenerate_resamples = 0;
  std::vector<double> boot_stats;  // filled only when requested
  StatProfile profile;
};

/// Pooled-resampling bootstrap test of F_j == G_j.
///   p = #{A_k >= T_0} / B, coefficient = 1 - p.
/// Replication k draws from its own stream derived from (cfg.seed, k); the
/// roles of f and g in resampling are canonicalised so that
/// pair_test(f, g) and pair_test(g, f) agree exactly.
/// Throws NumericalError if the original pair has no defined grid point.
PairTestResult pair_test(SeriesView f, SeriesView g, const BootstrapConfig& cfg,
                         bool keep_boot_stats = false);

/// Replication extremes for the same resamples pair_test would draw.
std::vector<ReplicateExtremes> bootstrap_replicates(SeriesView f, SeriesView g,
                                                    const BootstrapConfig& cfg);

/// Value c with #{stat_k >= c} = floor(B * alpha), i.e. the floor(B*alpha)-th
/// largest statistic (the largest when B*alpha < 1).
double critical_value(std::span<const double> boot_stats, double alpha);

}  // namespace sdclust
