#include "sdcluster/dominance_rank.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "sdcluster/digest.hpp"
#include "sdcluster/parallel.hpp"

namespace sdclust {

using nlohmann::ordered_json;

std::string_view to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::Dominates: return "dominates";
    case Outcome::DominatedBy: return "dominated_by";
    case Outcome::Equivalent: return "equivalent";
    case Outcome::NoClear: return "no_clear";
  }
  return "equivalent";
}

Outcome parse_outcome(std::string_view text) {
  for (Outcome o : {Outcome::Dominates, Outcome::DominatedBy, Outcome::Equivalent, Outcome::NoClear}) {
    if (to_string(o) == text) return o;
  }
  throw DataError("unknown dominance outcome '" + std::string(text) + "'");
}

Outcome reversed(Outcome o) noexcept {
  if (o == Outcome::Dominates) return Outcome::DominatedBy;
  if (o == Outcome::DominatedBy) return Outcome::Dominates;
  return o;
}

std::string_view symbol(Outcome o) noexcept {
  switch (o) {
    case Outcome::Dominates: return "≻";
    case Outcome::DominatedBy: return "≺";
    case Outcome::Equivalent: return "≡";
    case Outcome::NoClear: return "⊁";
  }
  return "≡";
}

DominanceVerdict directional_test(SeriesView f, SeriesView g, const BootstrapConfig& cfg, double alpha) {
  cfg.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (f.empty() || g.empty()) throw DataError("directional test needs non-empty samples");
  const auto [fmin, fmax] = std::minmax_element(f.begin(), f.end());
  const auto [gmin, gmax] = std::minmax_element(g.begin(), g.end());
  const double lo = std::min(*fmin, *gmin);
  const double hi = std::max(*fmax, *gmax);
  if (!(lo < hi)) throw NumericalError("directional test undefined: both samples are the same constant");

  const auto profile = stat_profile(f, g, statistic_grid(lo, hi, cfg.grid_points), cfg.order,
                                    cfg.direction, cfg.var_floor);
  const auto reps = bootstrap_replicates(f, g, cfg);
  std::vector<double> tails;
  tails.reserve(2 * reps.size());
  for (const auto& r : reps) {
    tails.push_back(r.max);
    tails.push_back(-r.min);
  }

  DominanceVerdict v;
  v.order = cfg.order;
  v.direction = cfg.direction;
  v.alpha = alpha;
  v.max_t = profile.max;
  v.min_t = profile.min;
  v.crit = critical_value(tails, alpha);

  const bool low = v.min_t < -v.crit;
  const bool high = v.max_t > v.crit;
  const bool f_side = cfg.direction == Direction::Ascending ? low : high;
  const bool g_side = cfg.direction == Direction::Ascending ? high : low;
  if (f_side && g_side) v.outcome = Outcome::NoClear;
  else if (f_side) v.outcome = Outcome::Dominates;
  else if (g_side) v.outcome = Outcome::DominatedBy;
  else v.outcome = Outcome::Equivalent;
  return v;
}

Outcome ClusterRanking::outcome(std::size_t a, std::size_t b) const {
  if (a == b) return Outcome::Equivalent;
  for (const auto& pv : verdicts) {
    if (pv.a == a && pv.b == b) return pv.verdict.outcome;
    if (pv.a == b && pv.b == a) return reversed(pv.verdict.outcome);
  }
  throw DataError("no verdict for clusters " + std::to_string(a) + " and " + std::to_string(b));
}

bool ClusterRanking::is_optimal(std::size_t cluster) const {
  return std::binary_search(optimal.begin(), optimal.end(), cluster);
}

namespace {

std::vector<std::vector<std::size_t>> equivalence_groups(std::size_t k, const std::vector<PairVerdict>& verdicts) {
  std::vector<std::size_t> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& pv : verdicts) {
    if (pv.verdict.outcome != Outcome::Equivalent) continue;
    const auto ra = find(pv.a);
    const auto rb = find(pv.b);
    parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> index(k, k);
  for (std::size_t c = 0; c < k; ++c) {
    const auto r = find(c);
    if (index[r] == k) {
      index[r] = groups.size();
      groups.emplace_back();
    }
    groups[index[r]].push_back(c);
  }
  return groups;
}

// The seed depends on the smallest cluster id of each side, so a test between
// two singleton groups reproduces the corresponding center test.
std::vector<PairVerdict> pairwise(const std::vector<Series>& series, const std::vector<std::size_t>& keys,
                                  const BootstrapConfig& cfg, double alpha, int workers) {
  std::vector<PairVerdict> out;
  for (std::size_t a = 0; a < series.size(); ++a)
    for (std::size_t b = a + 1; b < series.size(); ++b) out.push_back({a, b, {}});
  parallel_for(out.size(), workers, [&](std::size_t p) {
    auto& pv = out[p];
    const auto seed = derive_seed(cfg.seed, {fnv1a("rank"), keys[pv.a], keys[pv.b]});
    pv.verdict = directional_test(series[pv.a], series[pv.b], cfg.with_seed(seed), alpha);
  });
  return out;
}

Series weighted_mean(const std::vector<Series>& centers, const std::vector<std::size_t>& sizes,
                     const std::vector<std::size_t>& group) {
  Series out(centers.at(group.front()).size(), 0.0);
  double total = 0.0;
  for (std::size_t c : group) {
    const auto w = static_cast<double>(sizes[c]);
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += w * centers[c][t];
    total += w;
  }
  for (double& v : out) v /= total;
  return out;
}

}  // namespace

ClusterRanking rank_centers(const Clustering& clustering, const BootstrapConfig& cfg, double alpha,
                            int workers) {
  cfg.validate();
  clustering.validate();
  const std::size_t k = clustering.k;
  if (k < 2) throw ConfigError("ranking needs K >= 2");
  if (clustering.centers.size() != k) throw ConfigError("cluster centers are not attached");

  ClusterRanking r;
  r.k = k;
  r.order = cfg.order;
  r.direction = cfg.direction;
  r.alpha = alpha;
  std::vector<std::size_t> ids(k);
  std::iota(ids.begin(), ids.end(), 0);
  r.verdicts = pairwise(clustering.centers, ids, cfg, alpha, workers);
  r.groups = equivalence_groups(k, r.verdicts);

  const std::size_t ng = r.groups.size();
  if (ng > 1) {
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t l : clustering.labels) ++sizes[l];
    std::vector<Series> series;
    std::vector<std::size_t> keys;
    for (const auto& g : r.groups) {
      series.push_back(weighted_mean(clustering.centers, sizes, g));
      keys.push_back(g.front());
    }
    r.group_verdicts = pairwise(series, keys, cfg, alpha, workers);
  }

  std::vector<int> wins(ng, 0);
  std::vector<int> losses(ng, 0);
  for (const auto& pv : r.group_verdicts) {
    if (pv.verdict.outcome == Outcome::Dominates) {
      ++wins[pv.a];
      ++losses[pv.b];
    } else if (pv.verdict.outcome == Outcome::DominatedBy) {
      ++wins[pv.b];
      ++losses[pv.a];
    }
  }

  std::vector<std::size_t> chosen;
  const bool any_dominance = std::any_of(wins.begin(), wins.end(), [](int w) { return w > 0; });
  if (!any_dominance) {
    for (std::size_t g = 0; g < ng; ++g) chosen.push_back(g);
  } else {
    for (std::size_t g = 0; g < ng; ++g)
      if (losses[g] == 0 && wins[g] > 0) chosen.push_back(g);
    if (chosen.empty()) {
      int best = wins[0] - losses[0];
      for (std::size_t g = 1; g < ng; ++g) best = std::max(best, wins[g] - losses[g]);
      for (std::size_t g = 0; g < ng; ++g)
        if (wins[g] - losses[g] == best) chosen.push_back(g);
    }
  }
  for (std::size_t g : chosen) r.optimal.insert(r.optimal.end(), r.groups[g].begin(), r.groups[g].end());
  std::sort(r.optimal.begin(), r.optimal.end());
  return r;
}

std::vector<std::string> refine_pool(const ReturnPanel& panel, const Clustering& clustering,
                                     const ClusterRanking& ranking, const BootstrapConfig& cfg,
                                     double alpha, int workers) {
  if (cfg.order != ranking.order || cfg.direction != ranking.direction) {
    throw ConfigError("refine_pool must use the order and direction of the ranking");
  }
  if (ranking.optimal.empty()) throw DataError("ranking has no optimal cluster");
  Clustering c = clustering;
  if (c.centers.size() != c.k) attach_centers(c, panel);

  const std::size_t n = c.tickers.size();
  std::vector<char> keep(n, 1);
  std::vector<std::pair<std::size_t, std::size_t>> tests;
  for (std::size_t i = 0; i < n; ++i) {
    if (ranking.is_optimal(c.labels[i])) continue;
    for (std::size_t o : ranking.optimal) tests.emplace_back(i, o);
  }
  std::vector<Outcome> outcomes(tests.size());
  parallel_for(tests.size(), workers, [&](std::size_t p) {
    const auto [i, o] = tests[p];
    const auto seed = derive_seed(cfg.seed, {fnv1a("refine"), fnv1a(c.tickers[i]), o});
    const auto& series = panel.columns[panel.index_of(c.tickers[i])];
    outcomes[p] = directional_test(series, c.centers[o], cfg.with_seed(seed), alpha).outcome;
  });
  for (std::size_t p = 0; p < tests.size(); ++p)
    if (outcomes[p] == Outcome::DominatedBy) keep[tests[p].first] = 0;

  std::vector<std::string> pool;
  for (const auto& t : panel.tickers) {
    const auto it = std::find(c.tickers.begin(), c.tickers.end(), t);
    if (it != c.tickers.end() && keep[static_cast<std::size_t>(it - c.tickers.begin())]) pool.push_back(t);
  }
  if (pool.empty()) throw DataError("refined pool is empty");
  return pool;
}

namespace {

ordered_json verdicts_to_json(const std::vector<PairVerdict>& verdicts) {
  auto arr = ordered_json::array();
  for (const auto& pv : verdicts) {
    arr.push_back({{"a", pv.a},
                   {"b", pv.b},
                   {"outcome", to_string(pv.verdict.outcome)},
                   {"max_t", pv.verdict.max_t},
                   {"min_t", pv.verdict.min_t},
                   {"crit", pv.verdict.crit},
                   {"alpha", pv.verdict.alpha}});
  }
  return arr;
}

std::vector<PairVerdict> verdicts_from_json(const nlohmann::json& arr, SdOrder order, Direction dir) {
  std::vector<PairVerdict> out;
  for (const auto& e : arr) {
    PairVerdict pv;
    pv.a = e.at("a").get<std::size_t>();
    pv.b = e.at("b").get<std::size_t>();
    pv.verdict.order = order;
    pv.verdict.direction = dir;
    pv.verdict.outcome = parse_outcome(e.at("outcome").get<std::string>());
    pv.verdict.max_t = e.at("max_t").get<double>();
    pv.verdict.min_t = e.at("min_t").get<double>();
    pv.verdict.crit = e.at("crit").get<double>();
    pv.verdict.alpha = e.at("alpha").get<double>();
    out.push_back(pv);
  }
  return out;
}

}  // namespace

std::string ranking_to_json(const ClusterRanking& ranking) {
  ordered_json j;
  j["K"] = ranking.k;
  j["order"] = ranking.order.value();
  j["direction"] = to_string(ranking.direction);
  j["alpha"] = ranking.alpha;
  j["verdicts"] = verdicts_to_json(ranking.verdicts);
  j["groups"] = ranking.groups;
  j["group_verdicts"] = verdicts_to_json(ranking.group_verdicts);
  j["optimal"] = ranking.optimal;
  return j.dump(2) + "\n";
}

ClusterRanking ranking_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ClusterRanking r;
    r.k = j.at("K").get<std::size_t>();
    r.order = SdOrder(j.at("order").get<int>());
    r.direction = parse_direction(j.at("direction").get<std::string>());
    r.alpha = j.at("alpha").get<double>();
    r.verdicts = verdicts_from_json(j.at("verdicts"), r.order, r.direction);
    r.groups = j.at("groups").get<std::vector<std::vector<std::size_t>>>();
    r.group_verdicts = verdicts_from_json(j.at("group_verdicts"), r.order, r.direction);
    r.optimal = j.at("optimal").get<std::vector<std::size_t>>();
    std::sort(r.optimal.begin(), r.optimal.end());
    for (std::size_t o : r.optimal)
      if (o >= r.k) throw DataError("optimal cluster id out of range");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed ranking JSON: ") + e.what());
  }
}

std::string dominance_table(const ClusterRanking& ranking) {
  std::string out = "cluster";
  for (std::size_t b = 0; b < ranking.k; ++b) out += "\t" + std::to_string(b);
  out += "\n";
  for (std::size_t a = 0; a < ranking.k; ++a) {
    out += std::to_string(a);
    for (std::size_t b = 0; b < ranking.k; ++b) {
      out += "\t";
      out += a == b ? std::string_view("-") : symbol(ranking.outcome(a, b));
    }
    out += "\n";
  }
  return out;
}

}  // namespace sdclust
