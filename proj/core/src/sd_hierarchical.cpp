#include "sdcluster/sd_hierarchical.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <json.hpp>

namespace sdclust {

namespace {

// Distances within this band of the current minimum count as ties.
constexpr double kTieTolerance = 1e-12;

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Roots of the partition after the first leaves - k merges, per leaf.
std::vector<std::size_t> cut_roots(const Dendrogram& d, std::size_t k) {
  if (k < 1 || k > d.leaves) throw ConfigError("K must lie in [1, n]");
  UnionFind uf(d.leaves);
  // Cluster id -> one representative leaf.
  std::vector<std::size_t> rep(d.leaves + d.merges.size());
  std::iota(rep.begin(), rep.begin() + static_cast<std::ptrdiff_t>(d.leaves), 0);
  for (std::size_t s = 0; s < d.leaves - k; ++s) {
    const auto& m = d.merges.at(s);
    uf.unite(rep[m.a], rep[m.b]);
    rep[d.leaves + s] = rep[m.a];
  }
  std::vector<std::size_t> roots(d.leaves);
  for (std::size_t i = 0; i < d.leaves; ++i) roots[i] = uf.find(i);
  return roots;
}

}  // namespace

std::vector<std::size_t> Dendrogram::cut(std::size_t k) const {
  const auto roots = cut_roots(*this, k);
  std::map<std::size_t, std::size_t> label_of_root;
  std::vector<std::size_t> labels(leaves);
  for (std::size_t i = 0; i < leaves; ++i) {
    auto [it, inserted] = label_of_root.emplace(roots[i], label_of_root.size());
    labels[i] = it->second;
  }
  return labels;
}

std::vector<std::size_t> Dendrogram::cut(std::size_t k, const std::vector<std::string>& tickers) const {
  if (tickers.size() != leaves) throw DataError("ticker count does not match dendrogram leaves");
  const auto roots = cut_roots(*this, k);
  std::map<std::size_t, std::string> key;
  for (std::size_t i = 0; i < leaves; ++i) {
    auto [it, inserted] = key.emplace(roots[i], tickers[i]);
    if (!inserted && tickers[i] < it->second) it->second = tickers[i];
  }
  std::vector<std::pair<std::string, std::size_t>> order;
  for (const auto& [root, t] : key) order.emplace_back(t, root);
  std::sort(order.begin(), order.end());
  std::map<std::size_t, std::size_t> label_of_root;
  for (std::size_t l = 0; l < order.size(); ++l) label_of_root[order[l].second] = l;
  std::vector<std::size_t> labels(leaves);
  for (std::size_t i = 0; i < leaves; ++i) labels[i] = label_of_root[roots[i]];
  return labels;
}

double average_linkage(const Matrix& dist, std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.empty() || b.empty()) throw ConfigError("average linkage of an empty cluster");
  double sum = 0.0;
  for (std::size_t x : a)
    for (std::size_t y : b) sum += dist(x, y);
  return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

Dendrogram build_dendrogram(const SDMatrix& matrix) {
  matrix.validate();
  const std::size_t n = matrix.size();
  Dendrogram d;
  d.leaves = n;
  if (n == 0) return d;

  Matrix dist = matrix.values;
  std::vector<bool> active(n, true);
  std::vector<std::size_t> id(n);
  std::vector<std::size_t> size(n, 1);
  std::vector<std::string> key = matrix.tickers;
  std::iota(id.begin(), id.end(), 0);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t bp = 0, bq = 0;
    double best = 0.0;
    bool found = false;
    for (std::size_t p = 0; p < n; ++p) {
      if (!active[p]) continue;
      for (std::size_t q = p + 1; q < n; ++q) {
        if (!active[q]) continue;
        const double v = dist(p, q);
        bool take = !found || v < best - kTieTolerance;
        if (!take && v <= best + kTieTolerance) {
          const auto cand = std::minmax(key[p], key[q]);
          const auto cur = std::minmax(key[bp], key[bq]);
          take = cand < cur;
        }
        if (take) {
          best = v;
          bp = p;
          bq = q;
          found = true;
        }
      }
    }

    const double sp = static_cast<double>(size[bp]);
    const double sq = static_cast<double>(size[bq]);
    for (std::size_t r = 0; r < n; ++r) {
      if (!active[r] || r == bp || r == bq) continue;
      const double v = (sp * dist(bp, r) + sq * dist(bq, r)) / (sp + sq);
      dist(bp, r) = v;
      dist(r, bp) = v;
    }
    d.merges.push_back({std::min(id[bp], id[bq]), std::max(id[bp], id[bq]), best, size[bp] + size[bq]});
    id[bp] = n + step;
    size[bp] += size[bq];
    key[bp] = std::min(key[bp], key[bq]);
    active[bq] = false;
  }
  return d;
}

HierarchicalResult sd_hierarchical(const SDMatrix& matrix, std::size_t k) {
  const std::size_t n = matrix.size();
  if (k < 1 || k > n) {
    throw ConfigError("K (" + std::to_string(k) + ") must lie in [1, " + std::to_string(n) + "]");
  }
  HierarchicalResult out;
  out.dendrogram = build_dendrogram(matrix);
  out.clustering.tickers = matrix.tickers;
  out.clustering.labels = out.dendrogram.cut(k, matrix.tickers);
  out.clustering.k = k;
  out.clustering.iterations_used = n - k;
  out.clustering.converged = true;
  return out;
}

std::string dendrogram_to_json(const Dendrogram& d, const std::vector<std::string>& tickers) {
  nlohmann::json j;
  j["leaves"] = tickers;
  auto merges = nlohmann::json::array();
  for (const auto& m : d.merges) {
    merges.push_back({{"a", m.a}, {"b", m.b}, {"height", m.height}, {"size", m.size}});
  }
  j["merges"] = merges;
  return j.dump(2) + "\n";
}

}  // namespace sdclust
