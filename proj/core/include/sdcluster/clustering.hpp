#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sdcluster/market_data.hpp"
#include "sdcluster/types.hpp"

namespace sdclust {

/// Assignment of assets to K clusters, optionally with per-cluster center
/// series (per-period mean of the members' returns).
struct Clustering {
  std::vector<std::string> tickers;
  std::vector<std::size_t> labels;  // parallel to tickers, each in [0, k)
  std::size_t k = 0;
  std::vector<Series> centers;      // empty until attached
  std::size_t iterations_used = 0;
  bool converged = true;
  /// Coefficient between each asset and its own center, when computed.
  std::vector<double> member_distance;

  std::vector<std::vector<std::size_t>> members() const;
  std::vector<std::string> member_tickers(std::size_t cluster) const;
  std::size_t label_of(std::string_view ticker) const;
  /// Throws DataError on unassigned assets, labels out of range or empty clusters.
  void validate() const;
};

/// Computes centers as the per-period mean of each cluster's member series.
void attach_centers(Clustering& clustering, const ReturnPanel& panel);

/// Partition as a set of ticker sets; label-permutation invariant.
std::set<std::set<std::string>> partition_of(const Clustering& clustering);

/// {K, assignments: {ticker: idx}, iterations_used, converged}
std::string clustering_to_json(const Clustering& clustering);
Clustering clustering_from_json(std::string_view text);

}  // namespace sdclust
