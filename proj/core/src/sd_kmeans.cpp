#include "sdcluster/sd_kmeans.hpp"

#include <limits>

#include "sdcluster/digest.hpp"
#include "sdcluster/parallel.hpp"

namespace sdclust {

double kmeans_distance(SeriesView stock, SeriesView center, const BootstrapConfig& cfg) {
  return pair_test(stock, center, cfg).coefficient;
}

namespace {

constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

// Moves the stock farthest from its own center into each empty cluster.
// Donor clusters must keep at least one member.
void repair_empty_clusters(std::vector<std::size_t>& labels, const std::vector<double>& dist,
                           std::size_t k) {
  const std::size_t n = labels.size();
  for (std::size_t t = 0; t < k; ++t) {
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t l : labels) ++sizes[l];
    if (sizes[t] != 0) continue;
    std::size_t best = kUnassigned;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (sizes[labels[i]] < 2) continue;
      const double d = dist[i * k + labels[i]];
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    if (best == kUnassigned) throw NumericalError("cannot repair empty cluster");
    labels[best] = t;
  }
}

// One pass of the printed algorithm from K uniformly drawn stocks. Restart 0
// uses the untagged seeds, so a single restart reproduces the plain algorithm.
Clustering run_once(const ReturnPanel& panel, const BootstrapConfig& cfg, const BootstrapConfig& iter_cfg,
                    const KMeansOptions& options, const std::vector<std::uint64_t>& keys, std::size_t restart) {
  const std::size_t n = panel.assets();
  const std::size_t k = options.k;
  auto tagged = [restart](std::uint64_t root, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t s = derive_seed(root, parts);
    return restart == 0 ? s : derive_seed(s, {fnv1a("restart"), restart});
  };

  Rng init_rng(tagged(options.seed, {fnv1a("kmeans-init")}));
  const auto picks = sample_without_replacement(init_rng, n, k);
  std::vector<Series> centers;
  for (std::size_t p : picks) centers.push_back(panel.columns[p]);

  std::vector<std::size_t> labels(n, kUnassigned);
  std::vector<double> dist(n * k);
  Clustering result;
  result.tickers = panel.tickers;
  result.k = k;
  result.converged = false;

  for (std::size_t ite = 0; ite < options.max_iter; ++ite) {
    parallel_for(n * k, options.workers, [&](std::size_t w) {
      const std::size_t i = w / k;
      const std::size_t t = w % k;
      const auto seed = tagged(cfg.seed, {fnv1a("kmeans"), keys[i], ite, t});
      dist[w] = kmeans_distance(panel.columns[i], centers[t], iter_cfg.with_seed(seed));
    });

    std::vector<std::size_t> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      for (std::size_t t = 1; t < k; ++t)
        if (dist[i * k + t] < dist[i * k + best]) best = t;
      next[i] = best;
    }
    repair_empty_clusters(next, dist, k);

    const bool changed = next != labels;
    labels = std::move(next);
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < n; ++i) members[labels[i]].push_back(i);
    for (std::size_t t = 0; t < k; ++t) centers[t] = mean_series(panel, members[t]);

    result.iterations_used = ite + 1;
    if (!changed) {
      result.converged = true;
      break;
    }
  }

  result.labels = labels;
  result.centers = centers;
  result.member_distance.resize(n);
  parallel_for(n, options.workers, [&](std::size_t i) {
    const auto seed = tagged(cfg.seed, {fnv1a("kmeans-final"), keys[i], labels[i]});
    result.member_distance[i] = kmeans_distance(panel.columns[i], centers[labels[i]], cfg.with_seed(seed));
  });
  return result;
}

double total_distance(const Clustering& c) {
  double s = 0.0;
  for (double d : c.member_distance) s += d;
  return s;
}

}  // namespace

Clustering sd_kmeans(const ReturnPanel& panel, const BootstrapConfig& cfg, const KMeansOptions& options) {
  cfg.validate();
  panel.validate();
  const std::size_t n = panel.assets();
  const std::size_t k = options.k;
  if (k < 2) throw ConfigError("K-means needs K >= 2");
  if (k > n) throw ConfigError("K (" + std::to_string(k) + ") exceeds the number of assets (" +
                               std::to_string(n) + ")");
  if (options.max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (options.restarts < 1) throw ConfigError("K-means needs at least one restart");

  BootstrapConfig iter_cfg = cfg;
  if (options.iteration_reps > 0) iter_cfg.reps = options.iteration_reps;

  std::vector<std::uint64_t> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = fnv1a(panel.tickers[i]);

  Clustering best = run_once(panel, cfg, iter_cfg, options, keys, 0);
  double best_total = total_distance(best);
  for (std::size_t r = 1; r < options.restarts; ++r) {
    auto c = run_once(panel, cfg, iter_cfg, options, keys, r);
    const double total = total_distance(c);
    if (total < best_total) {
      best = std::move(c);
      best_total = total;
    }
  }
  best.validate();
  return best;
}

}  // namespace sdclust
