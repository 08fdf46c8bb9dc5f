// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sdcluster/bootstrap.hpp"
#include "sdcluster/coefficient_matrix.hpp"
#include "sdcluster/dominance_rank.hpp"
#include "sdcluster/portfolio.hpp"
#include "sdcluster/digest.hpp"
#include "sdcluster/sd_core.hpp"
#include "sdcluster/sd_hierarchical.hpp"
#include "sdcluster/sd_kmeans.hpp"
#include "sdcluster/validity.hpp"
#include "sdcluster_cli/commands.hpp"
#include "sdcluster_cli/synthetic.hpp"

namespace fs = std::filesystem;
using namespace sdclust;

namespace {

struct Result {
  bool ok = true;
  std::string detail;
};

BootstrapConfig boot(std::size_t reps, std::uint64_t seed, int j = 1, Direction dir = Direction::Ascending) {
  BootstrapConfig c;
  c.reps = reps;
  c.seed = seed;
  c.order = SdOrder{j};
  c.direction = dir;
  return c;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<std::size_t> labels_in(const Clustering& c, const std::vector<std::string>& tickers) {
  std::vector<std::size_t> out;
  for (const auto& t : tickers) out.push_back(c.label_of(t));
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result c1_integral_oracle() {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto sample = oracle::normal_sample(1000 + s, 10, 0.0, 0.03);
    const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
    const auto xs = oracle::uniform_sample(2000 + s, 2, *lo - 0.02, *hi + 0.02);
    for (double x : xs)
      for (int j : {2, 3})
        for (auto dir : {Direction::Ascending, Direction::Descending}) {
          const double got = sd_integral(sample, x, SdOrder{j}, dir);
          const double want = oracle::trapezoid_integral(sample, x, j, dir, 5e-7);
          worst = std::max(worst, std::abs(got - want));
        }
  }
  return {worst <= 1e-6, fmt("max |error| %.3g", worst)};
}

Result c2_identical_null() {
  bool ok = true;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = oracle::normal_sample(s, 20 + s, 0.0, 1.0);
    for (int j = 1; j <= 3; ++j) ok &= pair_test(f, f, boot(100, s, j)).coefficient == 0.0;
  }
  std::vector<std::vector<double>> cols;
  for (std::size_t i = 0; i < 5; ++i) cols.push_back(oracle::normal_sample(40 + i, 30, 0.0, 1.0));
  const auto m = build_matrix(oracle::make_panel(cols), boot(100, 1));
  for (std::size_t i = 0; i < m.size(); ++i) ok &= m(i, i) == 0.0;
  return {ok, "pair_test(f,f) and matrix diagonal"};
}

Result c3_first_order_directions() {
  std::size_t equal = 0;
  std::size_t touching = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto f = oracle::normal_sample(3000 + s, 40, 0.0, 1.0);
    const auto g = oracle::normal_sample(4000 + s, 45, 0.2, 1.3);
    std::vector<double> all(f);
    all.insert(all.end(), g.begin(), g.end());
    const auto [lo, hi] = std::minmax_element(all.begin(), all.end());
    for (double x : statistic_grid(*lo, *hi, kDefaultGridPoints))
      touching += std::count(all.begin(), all.end(), x);
    const auto a = pair_test(f, g, boot(200, s, 1, Direction::Ascending));
    const auto d = pair_test(f, g, boot(200, s, 1, Direction::Descending));
    equal += a.coefficient == d.coefficient && a.t0_max_abs == d.t0_max_abs;
  }
  std::vector<std::vector<double>> cols;
  for (std::size_t i = 0; i < 5; ++i) cols.push_back(oracle::normal_sample(50 + i, 40, 0.1 * i, 1.0));
  const auto panel = oracle::make_panel(cols);
  const bool matrices = build_matrix(panel, boot(100, 9, 1, Direction::Ascending)).values ==
                        build_matrix(panel, boot(100, 9, 1, Direction::Descending)).values;
  return {equal == 100 && touching == 0 && matrices,
          fmt("%.0f/100 bit-equal, %.0f grid points on samples, matrices equal: %.0f", static_cast<double>(equal),
              static_cast<double>(touching), matrices ? 1.0 : 0.0)};
}

Result c4_null_calibration() {
  std::size_t rejected = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto f = oracle::normal_sample(5000 + 2 * s, 100, 0.0, 1.0);
    const auto g = oracle::normal_sample(5001 + 2 * s, 100, 0.0, 1.0);
    rejected += pair_test(f, g, boot(500, s, 1)).p_value < 0.05;
  }
  const double rate = static_cast<double>(rejected) / 200.0;
  return {rate >= 0.01 && rate <= 0.12, fmt("rejection rate %.3f", rate)};
}

Result c5_shift_power() {
  const auto g = oracle::normal_sample(6000, 200, 0.0, 1.0);
  const auto f = oracle::shifted(g, 5.0);
  const double coef = pair_test(f, g, boot(500, 7, 1)).coefficient;
  const auto asc = directional_test(f, g, boot(500, 7, 1, Direction::Ascending)).outcome;
  const auto desc = directional_test(f, g, boot(500, 7, 1, Direction::Descending)).outcome;
  return {coef >= 0.95 && asc == sdclust::Outcome::Dominates && desc == sdclust::Outcome::Dominates,
          "coefficient " + fmt("%.4f", coef) + ", asc " + std::string(to_string(asc)) + ", desc " +
              std::string(to_string(desc))};
}

Result c6_risk_separation() {
  const auto low = oracle::normal_sample(7000, 300, 0.0, 0.01);
  const auto high = oracle::normal_sample(7001, 300, 0.0, 0.05);
  const auto first = directional_test(low, high, boot(500, 11, 1)).outcome;
  const auto asc = directional_test(low, high, boot(500, 11, 2, Direction::Ascending)).outcome;
  const auto desc = directional_test(high, low, boot(500, 11, 2, Direction::Descending)).outcome;
  const bool ok = (first == sdclust::Outcome::Equivalent || first == sdclust::Outcome::NoClear) &&
                  asc == sdclust::Outcome::Dominates && desc == sdclust::Outcome::Dominates;
  return {ok, "j=1 " + std::string(to_string(first)) + ", j=2 asc low " + std::string(to_string(asc)) +
                  ", j=2 desc high " + std::string(to_string(desc))};
}

Result c7_cluster_recovery() {
  const auto spec = cli::three_group_spec();
  const auto truth = cli::group_labels(spec);
  double worst_h = 1.0;
  double worst_k = 1.0;
  std::string ks;
  bool all_three = true;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const auto panel = cli::synthetic_returns(spec, 260, s);
    const auto cfg = boot(300, derive_seed(s, {fnv1a("acceptance")}), 2, Direction::Ascending);
    const auto m = build_matrix(panel, cfg);
    const auto h = sd_hierarchical(m, 3);
    worst_h = std::min(worst_h, oracle::adjusted_rand(labels_in(h.clustering, panel.tickers), truth));
    KMeansOptions ko;
    ko.k = 3;
    ko.iteration_reps = 300;
    ko.seed = s;
    const auto km = sd_kmeans(panel, cfg, ko);
    worst_k = std::min(worst_k, oracle::adjusted_rand(labels_in(km, panel.tickers), truth));
    SelectKOptions so;
    so.k_min = 2;
    so.k_max = 6;
    so.compute_dbi = false;
    const auto best = select_k(m, nullptr, cfg, so).best_k;
    ks += std::to_string(best);
    all_three &= best == 3;
  }
  return {worst_h >= 0.9 && worst_k >= 0.9 && all_three,
          fmt("min ARI hierarchical %.3f, k-means %.3f", worst_h, worst_k) + ", K* per seed " + ks};
}

Result c8_validity() {
  double worst = 0.0;
  bool ranges = true;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::size_t n = 5 + s % 8;
    const std::size_t k = 2 + s % 3;
    const auto u = oracle::uniform_sample(8000 + s, n * n + n);
    Matrix v(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = i + 1; c < n; ++c) v(i, c) = v(c, i) = u[i * n + c];
    std::vector<std::string> tickers;
    std::vector<std::size_t> labels;
    for (std::size_t i = 0; i < n; ++i) {
      tickers.push_back("R" + std::to_string(i));
      labels.push_back(i < k ? i : static_cast<std::size_t>(u[n * n + i] * static_cast<double>(k)) % k);
    }
    const auto m = make_sd_matrix(tickers, v);
    Clustering c;
    c.tickers = tickers;
    c.labels = labels;
    c.k = k;
    std::vector<std::vector<double>> rows(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t q = 0; q < n; ++q) rows[i][q] = v(i, q);
    const double sc = sd_sc(m, c).value;
    worst = std::max(worst, std::abs(sc - oracle::silhouette(rows, labels)));
    ranges &= sc >= -1.0 && sc <= 1.0;

    std::vector<std::vector<double>> cols;
    for (std::size_t i = 0; i < n; ++i)
      cols.push_back(oracle::normal_sample(9000 + 100 * s + i, 30, 3.0 * static_cast<double>(labels[i]), 1.0));
    const auto dbi = sd_dbi(oracle::make_panel(cols, tickers), c, boot(50, s)).value;
    ranges &= dbi >= 0.0;
  }
  Matrix hv(4, 4, 0.6);
  for (std::size_t i = 0; i < 4; ++i) hv(i, i) = 0.0;
  hv(0, 1) = hv(1, 0) = hv(2, 3) = hv(3, 2) = 0.2;
  const auto hm = make_sd_matrix({"A", "B", "C", "D"}, hv);
  Clustering hc;
  hc.tickers = hm.tickers;
  hc.labels = {0, 0, 1, 1};
  hc.k = 2;
  const double hand = sd_sc(hm, hc).value;
  return {worst <= 1e-12 && ranges && std::abs(hand - 2.0 / 3.0) <= 1e-9,
          fmt("max |sd_sc - oracle| %.3g, hand case %.10f", worst, hand)};
}

Result c9_linkage() {
  double worst = 0.0;
  bool monotone = true;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::size_t n = 8;
    const auto u = oracle::uniform_sample(10000 + s, n * n);
    Matrix v(n, n, 0.0);
    std::vector<std::string> tickers;
    for (std::size_t i = 0; i < n; ++i) {
      tickers.push_back("L" + std::to_string(i));
      for (std::size_t c = i + 1; c < n; ++c) v(i, c) = v(c, i) = u[i * n + c];
    }
    const auto d = build_dendrogram(make_sd_matrix(tickers, v));
    std::vector<std::vector<std::size_t>> members(2 * n - 1);
    std::set<std::size_t> active;
    for (std::size_t i = 0; i < n; ++i) {
      members[i] = {i};
      active.insert(i);
    }
    auto direct = [&](std::size_t a, std::size_t b) {
      double sum = 0.0;
      for (auto i : members[a])
        for (auto q : members[b]) sum += v(i, q);
      return sum / static_cast<double>(members[a].size() * members[b].size());
    };
    double prev = -1.0;
    for (std::size_t step = 0; step < d.merges.size(); ++step) {
      const auto& mg = d.merges[step];
      worst = std::max(worst, std::abs(mg.height - direct(mg.a, mg.b)));
      double best = 1e300;
      for (auto a : active)
        for (auto b : active)
          if (a < b) best = std::min(best, direct(a, b));
      worst = std::max(worst, std::abs(mg.height - best));
      monotone &= mg.height >= prev;
      prev = mg.height;
      const std::size_t id = n + step;
      members[id] = members[mg.a];
      members[id].insert(members[id].end(), members[mg.b].begin(), members[mg.b].end());
      active.erase(mg.a);
      active.erase(mg.b);
      active.insert(id);
    }
  }
  return {worst <= 1e-12 && monotone, fmt("max |height - direct| %.3g", worst)};
}

Result c10_gmvp() {
  double worst_sum = 0.0;
  bool below = true;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::size_t n = 2 + s % 7;
    std::vector<std::vector<double>> cols;
    const auto common = oracle::normal_sample(11000 + s, 120, 0.0, 0.02);
    for (std::size_t i = 0; i < n; ++i) {
      auto c = oracle::normal_sample(12000 + 10 * s + i, 120, 0.001, 0.01 + 0.01 * static_cast<double>(i));
      for (std::size_t t = 0; t < c.size(); ++t) c[t] += 0.3 * common[t];
      cols.push_back(std::move(c));
    }
    const auto panel = oracle::make_panel(cols);
    const auto p = gmvp(panel, panel.tickers);
    worst_sum = std::max(worst_sum, std::abs(std::accumulate(p.weights.begin(), p.weights.end(), 0.0) - 1.0));
    std::vector<SeriesView> views(panel.columns.begin(), panel.columns.end());
    const auto cov = sample_covariance(views);
    double eq = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < n; ++c) eq += cov(i, c);
    eq /= static_cast<double>(n * n);
    below &= p.risk <= eq;
  }
  Matrix cov(2, 2, 0.0);
  cov(0, 0) = 1.0;
  cov(1, 1) = 3.0;
  const auto w = gmvp_weights(cov);
  const bool hand = std::abs(w[0] - 0.75) <= 1e-9 && std::abs(w[1] - 0.25) <= 1e-9;
  return {worst_sum <= 1e-10 && below && hand, fmt("max |sum - 1| %.3g, hand weights (%.12f, %.12f)", worst_sum, w[0], w[1])};
}

// Optimal-cluster members at second order in `dir`, with the rest as the rejected pool.
std::pair<std::vector<std::string>, std::vector<std::string>> select_pool(const ReturnPanel& panel, Direction dir) {
  const auto cfg = boot(300, 21, 2, dir);
  const auto m = build_matrix(panel, cfg);
  SelectKOptions so;
  so.compute_dbi = false;
  const auto chosen = select_k(m, nullptr, cfg, so);
  auto c = chosen.clusterings[chosen.best_k - so.k_min];
  attach_centers(c, panel);
  const auto ranking = rank_centers(c, cfg);
  std::vector<std::string> picked;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < panel.assets(); ++i) {
    (ranking.is_optimal(c.label_of(panel.tickers[i])) ? picked : rest).push_back(panel.tickers[i]);
  }
  return {picked, rest};
}

Result c11_directional_shape() {
  const auto panel = cli::synthetic_returns(cli::two_regime_spec(), 260, 20240601);
  const auto [asc_pick, asc_rest] = select_pool(panel, Direction::Ascending);
  const auto [desc_pick, desc_rest] = select_pool(panel, Direction::Descending);
  if (asc_pick.size() < 3 || asc_rest.size() < 3 || desc_pick.size() < 3 || desc_rest.size() < 3) {
    return {false, "a selected or rejected pool has fewer than 3 assets"};
  }
  const auto asc = draw_experiment(panel, asc_pick, asc_rest, 3, 100, 5);
  const auto desc = draw_experiment(panel, desc_pick, desc_rest, 3, 100, 5);
  const bool ok = asc.a.mean_risk < asc.b.mean_risk && desc.a.mean_risk > desc.b.mean_risk &&
                  desc.a.mean_return > desc.b.mean_return;
  return {ok, fmt("ASD risk %.3g vs %.3g; ", asc.a.mean_risk, asc.b.mean_risk) +
                  fmt("DSD risk %.3g vs %.3g, ", desc.a.mean_risk, desc.b.mean_risk) +
                  fmt("return %.3g vs %.3g", desc.a.mean_return, desc.b.mean_return)};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).generic_string()] = slurp(e.path());
  return files;
}

Result c12_determinism() {
  const auto root = fs::temp_directory_path() / "sdcluster_acceptance_determinism";
  fs::remove_all(root);
  const auto panel = cli::synthetic_returns(cli::three_group_spec(), 260, 3);
  fs::create_directories(root);
  std::ofstream(root / "prices.csv", std::ios::binary) << cli::prices_to_csv(cli::prices_from_returns(panel));
  cli::RunConfig cfg;
  cfg.prices = root / "prices.csv";
  cfg.out_dir = root / "run";
  cfg.reps = 300;
  std::ostringstream log;
  std::vector<std::map<std::string, std::string>> runs;
  std::vector<double> seconds;
  for (int i = 0; i < 2; ++i) {
    fs::remove_all(cfg.out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    cli::run_command("pipeline", cfg, log);
    seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    runs.push_back(snapshot(cfg.out_dir));
  }
  fs::remove_all(root);
  std::size_t differ = runs[0].size() == runs[1].size() ? 0 : 1;
  for (const auto& [name, bytes] : runs[0]) {
    const auto it = runs[1].find(name);
    differ += it == runs[1].end() || it->second != bytes;
  }
  return {differ == 0 && runs[0].count("manifest.json") == 1,
          fmt("%.0f files, %.0f differ; runs %.2fs", static_cast<double>(runs[0].size()),
              static_cast<double>(differ), seconds[0]) + fmt(" and %.2fs", seconds[1])};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Result()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "integral matches trapezoid oracle", 1.0, c1_integral_oracle},
      {2, "identical-sample null", 1.0, c2_identical_null},
      {3, "first-order ascending equals descending", 30.0, c3_first_order_directions},
      {4, "null calibration", 300.0, c4_null_calibration},
      {5, "shift power", 10.0, c5_shift_power},
      {6, "second-order risk separation", 60.0, c6_risk_separation},
      {7, "cluster recovery", 600.0, c7_cluster_recovery},
      {8, "validity indices", 30.0, c8_validity},
      {9, "average-linkage exactness", 5.0, c9_linkage},
      {10, "minimum-variance portfolio", 5.0, c10_gmvp},
      {11, "directional experiment shape", 120.0, c11_directional_shape},
      {12, "pipeline determinism", 1e9, c12_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Result out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = out.ok && in_time;
    failures += !pass;
    std::printf("%s %2d %s: %s (%.2fs%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), secs,
                in_time ? "" : ", over time limit");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
