#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "sdcluster/bootstrap.hpp"
#include "sdcluster/clustering.hpp"
#include "sdcluster/market_data.hpp"

namespace sdclust {

inline constexpr double kDefaultAlpha = 0.05;

enum class Outcome { Dominates, DominatedBy, Equivalent, NoClear };
std::string_view to_string(Outcome o) noexcept;
Outcome parse_outcome(std::string_view text);
/// Outcome seen from the other series.
Outcome reversed(Outcome o) noexcept;
/// ≻ ≺ ≡ ⊁
std::string_view symbol(Outcome o) noexcept;

/// One-sided SD tests of f against g. `crit` is the bootstrap critical value
/// M(alpha) shared by both tails.
struct DominanceVerdict {
  SdOrder order{1};
  Direction direction = Direction::Ascending;
  Outcome outcome = Outcome::Equivalent;
  double alpha = kDefaultAlpha;
  double max_t = 0.0;
  double min_t = 0.0;
  double crit = 0.0;
};

/// Ascending: min T < -M means f dominates, max T > M means g dominates.
/// Descending: max T > M means f dominates, min T < -M means g dominates.
/// Exactly one rejection gives a strict verdict, none Equivalent, both NoClear.
/// M is the floor(B*alpha)-th largest of the pooled signed extremes
/// {max T*_k} ∪ {-min T*_k}, which share one distribution under the pooled null.
DominanceVerdict directional_test(SeriesView f, SeriesView g, const BootstrapConfig& cfg,
                                  double alpha = kDefaultAlpha);

struct PairVerdict {
  std::size_t a = 0;
  std::size_t b = 0;
  DominanceVerdict verdict;  // a relative to b
};

struct ClusterRanking {
  std::size_t k = 0;
  SdOrder order{1};
  Direction direction = Direction::Ascending;
  double alpha = kDefaultAlpha;
  std::vector<PairVerdict> verdicts;            // cluster centers, a < b
  std::vector<std::vector<std::size_t>> groups;  // Equivalent-connected components
  std::vector<PairVerdict> group_verdicts;      // group mean series, by group index
  std::vector<std::size_t> optimal;              // cluster ids, ascending

  Outcome outcome(std::size_t a, std::size_t b) const;
  bool is_optimal(std::size_t cluster) const;
};

/// Pairwise verdicts among cluster centers, equivalence groups, and the
/// optimal clusters. Requires centers to be attached.
ClusterRanking rank_centers(const Clustering& clustering, const BootstrapConfig& cfg,
                            double alpha = kDefaultAlpha, int workers = 1);

/// Members of optimal clusters plus every other stock that no optimal center
/// dominates in a per-stock directional test. Ticker order follows the panel.
std::vector<std::string> refine_pool(const ReturnPanel& panel, const Clustering& clustering,
                                     const ClusterRanking& ranking, const BootstrapConfig& cfg,
                                     double alpha = kDefaultAlpha, int workers = 1);

std::string ranking_to_json(const ClusterRanking& ranking);
ClusterRanking ranking_from_json(std::string_view text);
/// K×K table of dominance symbols, row relative to column.
std::string dominance_table(const ClusterRanking& ranking);

}  // namespace sdclust
