#pragma once

#include <cstddef>
#include <cstdint>

#include "sdcluster/bootstrap.hpp"
#include "sdcluster/clustering.hpp"
#include "sdcluster/market_data.hpp"

namespace sdclust {

struct KMeansOptions {
  std::size_t k = 2;
  std::size_t max_iter = 100;
  /// Bootstrap replications per distance during the iterations; the final
  /// reported member distances use the full BootstrapConfig::reps.
  std::size_t iteration_reps = 300;
  /// Drives the choice of the initial K stocks.
  std::uint64_t seed = 0;
  /// Independent runs from fresh uniform draws of K stocks; the run with the
  /// smallest total member-to-center coefficient is kept (earliest on ties).
  /// 1 gives the single-run algorithm.
  std::size_t restarts = 10;
  int workers = 1;
};

/// SD coefficient between a stock's series and a center series.
double kmeans_distance(SeriesView stock, SeriesView center, const BootstrapConfig& cfg);

/// K-means where the point-to-center distance is the SD coefficient and the
/// center is the cross-sectional mean of its members. Starts from K distinct
/// random stocks; stops when no assignment changes or after max_iter passes.
/// Repeated `restarts` times.
Clustering sd_kmeans(const ReturnPanel& panel, const BootstrapConfig& cfg,
                     const KMeansOptions& options);

}  // namespace sdclust
