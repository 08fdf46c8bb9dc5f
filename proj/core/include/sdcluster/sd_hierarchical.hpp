#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sdcluster/clustering.hpp"
#include "sdcluster/coefficient_matrix.hpp"

namespace sdclust {

/// Merge of clusters `a` and `b` into a new cluster with id leaves + step.
/// Leaf ids are asset indices.
struct Merge {
  std::size_t a = 0;
  std::size_t b = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<Merge> merges;

  /// Labels after applying the first leaves - k merges.
  std::vector<std::size_t> cut(std::size_t k) const;
  std::vector<std::size_t> cut(std::size_t k, const std::vector<std::string>& tickers) const;
};

/// Mean of all |A|·|B| cross entries.
double average_linkage(const Matrix& dist, std::span<const std::size_t> a,
                       std::span<const std::size_t> b);

/// Full agglomeration with average linkage (Lance-Williams updates). Ties on
/// the minimum are broken by the lexicographically smallest pair of cluster
/// keys, where a cluster's key is its smallest member ticker.
Dendrogram build_dendrogram(const SDMatrix& matrix);

struct HierarchicalResult {
  Clustering clustering;
  Dendrogram dendrogram;
};

/// Throws ConfigError unless 1 <= k <= n. Clusters are numbered in order of
/// their smallest member ticker.
HierarchicalResult sd_hierarchical(const SDMatrix& matrix, std::size_t k);

std::string dendrogram_to_json(const Dendrogram& d, const std::vector<std::string>& tickers);

}  // namespace sdclust
