#pragma once

// Shared evaluation of the SD test statistic on a tied sorted support.
// Both the public stat_profile and the bootstrap go through here so that a
// resample evaluated either way produces bit-identical statistics.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sdcluster/types.hpp"

namespace sdclust::detail {

/// Distinct sorted values of f ∪ g with multiplicities per sample.
struct PairSupport {
  std::vector<double> values;
  std::vector<std::int64_t> f_counts;
  std::vector<std::int64_t> g_counts;
  std::int64_t nf = 0;
  std::int64_t ng = 0;
};

PairSupport make_support(SeriesView f, SeriesView g);

struct ProfileSummary {
  double max_abs = 0.0;
  double max = 0.0;
  double min = 0.0;
  std::size_t defined = 0;
};

/// Evaluates T_j at every grid point (ascending grid). When `t_out` is given
/// it receives one entry per grid point.
ProfileSummary evaluate_profile(std::span<const double> values, std::span<const std::int64_t> f_counts,
                                std::span<const std::int64_t> g_counts, std::int64_t nf,
                                std::int64_t ng, std::span<const double> grid, SdOrder j,
                                Direction dir, double var_floor,
                                std::vector<std::optional<double>>* t_out = nullptr);

inline ProfileSummary evaluate_profile(const PairSupport& s, std::span<const double> grid, SdOrder j,
                                       Direction dir, double var_floor,
                                       std::vector<std::optional<double>>* t_out = nullptr) {
  return evaluate_profile(s.values, s.f_counts, s.g_counts, s.nf, s.ng, grid, j, dir, var_floor,
                          t_out);
}

}  // namespace sdclust::detail
