#include "sdcluster_cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sdcluster/clustering.hpp"
#include "sdcluster/digest.hpp"
#include "sdcluster/dominance_rank.hpp"
#include "sdcluster/portfolio.hpp"
#include "sdcluster/sd_hierarchical.hpp"
#include "sdcluster/sd_kmeans.hpp"
#include "sdcluster/validity.hpp"
#include "sdcluster_cli/synthetic.hpp"

namespace sdclust::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("failed writing " + path.string());
}

const fs::path& require(const fs::path& p, std::string_view key) {
  if (p.empty()) throw ConfigError("missing required setting '" + std::string(key) + "'");
  return p;
}

std::string num(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

KMeansOptions kmeans_options(const RunConfig& cfg, std::size_t k) {
  KMeansOptions o;
  o.k = k;
  o.max_iter = cfg.max_iter;
  o.iteration_reps = cfg.iteration_reps;
  o.restarts = cfg.restarts;
  o.seed = cfg.seed;
  o.workers = cfg.workers;
  return o;
}

SDMatrix load_checked_matrix(const RunConfig& cfg, const ReturnPanel* panel) {
  auto m = load_matrix(require(cfg.matrix, "matrix"));
  if (panel != nullptr && !matches_panel(m, *panel)) {
    throw DataError("matrix " + cfg.matrix.string() + " was computed from a different return panel");
  }
  return m;
}

bool has_panel_input(const RunConfig& cfg) { return !cfg.returns.empty() || !cfg.prices.empty(); }

Clustering load_clustering(const RunConfig& cfg) {
  return clustering_from_json(read_file(require(cfg.clustering, "clustering")));
}

std::vector<std::string> members_of(const Clustering& c, const std::vector<std::size_t>& clusters,
                                    const ReturnPanel& panel) {
  std::vector<std::string> out;
  for (const auto& t : panel.tickers) {
    const auto it = std::find(c.tickers.begin(), c.tickers.end(), t);
    if (it == c.tickers.end()) continue;
    const auto label = c.labels[static_cast<std::size_t>(it - c.tickers.begin())];
    if (std::find(clusters.begin(), clusters.end(), label) != clusters.end()) out.push_back(t);
  }
  return out;
}

}  // namespace

int exit_code_for(const std::exception& e) noexcept {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->kind()) {
      case ErrorKind::Config: return 2;
      case ErrorKind::Data: return 3;
      case ErrorKind::Numerical: return 4;
    }
  }
  if (dynamic_cast<const fs::filesystem_error*>(&e) != nullptr) return 3;
  return 1;
}

ReturnPanel load_panel(const RunConfig& cfg) {
  ReturnPanel panel;
  if (!cfg.returns.empty()) {
    panel = load_returns(cfg.returns);
  } else if (!cfg.prices.empty()) {
    auto prices = load_prices(cfg.prices);
    if (cfg.frequency == "weekly") prices = to_weekly(prices);
    panel = log_returns(prices, cfg.min_coverage);
  } else {
    throw ConfigError("no input: set 'returns' or 'prices'");
  }
  if (!cfg.pool.empty()) panel = panel.select(read_pool(cfg.pool));
  return panel;
}

std::vector<std::string> read_pool(const fs::path& path) {
  try {
    const auto j = nlohmann::json::parse(read_file(path));
    return j.at("tickers").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed pool file " + path.string() + ": " + e.what());
  }
}

std::string pool_to_json(const std::vector<std::string>& tickers, std::string_view label) {
  ordered_json j;
  j["label"] = label;
  j["size"] = tickers.size();
  j["tickers"] = tickers;
  return j.dump(2) + "\n";
}

std::string heatmap_ppm(const SDMatrix& matrix, std::size_t scale) {
  if (scale < 1) throw ConfigError("heatmap scale must be at least 1");
  const std::size_t n = matrix.size();
  const std::size_t side = n * scale;
  std::string out = "P6\n" + std::to_string(side) + " " + std::to_string(side) + "\n255\n";
  out.reserve(out.size() + side * side * 3);
  for (std::size_t y = 0; y < side; ++y) {
    for (std::size_t x = 0; x < side; ++x) {
      const double v = std::clamp(matrix(y / scale, x / scale), 0.0, 1.0);
      const auto gray = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * (1.0 - v))));
      out.append(3, gray);
    }
  }
  return out;
}

void cmd_synth(const RunConfig& cfg, std::ostream& log) {
  const auto spec = cfg.synth == "two-regime" ? two_regime_spec() : three_group_spec();
  const auto returns = synthetic_returns(spec, cfg.synth_periods, cfg.seed);
  const auto path = cfg.out_dir / ("synthetic_" + cfg.synth + ".csv");
  write_file(path, prices_to_csv(prices_from_returns(returns)));
  log << "synth: " << returns.assets() << " assets, " << returns.periods_count() << " periods -> "
      << path.generic_string() << "\n";
}

void cmd_ingest(const RunConfig& cfg, std::ostream& log) {
  auto prices = load_prices(require(cfg.prices, "prices"));
  const auto raw_rows = prices.rows();
  if (cfg.frequency == "weekly") prices = to_weekly(prices);
  FilterReport report;
  auto panel = log_returns(prices, cfg.min_coverage, &report);
  if (!cfg.pool.empty()) panel = panel.select(read_pool(cfg.pool));

  const auto path = cfg.out_dir / "returns.csv";
  write_file(path, returns_to_csv(panel));
  ordered_json j;
  j["source"] = cfg.prices.generic_string();
  j["frequency"] = cfg.frequency;
  j["price_rows"] = raw_rows;
  j["periods"] = panel.periods_count();
  j["assets"] = panel.assets();
  j["dropped_rows"] = report.dropped_rows;
  auto dropped = ordered_json::array();
  for (std::size_t i = 0; i < report.dropped_tickers.size(); ++i) {
    dropped.push_back({{"ticker", report.dropped_tickers[i]}, {"coverage", report.dropped_coverage[i]}});
  }
  j["dropped_tickers"] = dropped;
  j["panel_digest"] = panel_digest(panel);
  write_file(cfg.out_dir / "ingest.json", j.dump(2) + "\n");
  log << "ingest: " << panel.assets() << " assets x " << panel.periods_count() << " periods -> "
      << path.generic_string() << "\n";
}

void cmd_matrix(const RunConfig& cfg, std::ostream& log) {
  const auto panel = load_panel(cfg);
  const auto m = build_matrix(panel, cfg.bootstrap(), cfg.workers);
  const auto path = cfg.out_dir / "matrix.csv";
  write_file(path, matrix_to_csv(m));
  log << "matrix: " << m.size() << " assets, order " << cfg.order << " " << to_string(cfg.direction)
      << " -> " << path.generic_string() << "\n";
}

void cmd_cluster(const RunConfig& cfg, std::ostream& log) {
  Clustering c;
  if (cfg.algorithm == Algorithm::Hierarchical) {
    std::optional<ReturnPanel> panel;
    if (has_panel_input(cfg)) panel = load_panel(cfg);
    const auto m = load_checked_matrix(cfg, panel ? &*panel : nullptr);
    auto result = sd_hierarchical(m, cfg.k);
    write_file(cfg.out_dir / "dendrogram.json", dendrogram_to_json(result.dendrogram, m.tickers));
    c = std::move(result.clustering);
  } else {
    const auto panel = load_panel(cfg);
    c = sd_kmeans(panel, cfg.bootstrap(), kmeans_options(cfg, cfg.k));
  }
  const auto path = cfg.out_dir / "clustering.json";
  write_file(path, clustering_to_json(c));
  log << "cluster: " << to_string(cfg.algorithm) << " K=" << c.k << " -> " << path.generic_string() << "\n";
}

void cmd_select_k(const RunConfig& cfg, std::ostream& log) {
  std::optional<ReturnPanel> panel;
  if (has_panel_input(cfg)) panel = load_panel(cfg);
  const auto m = load_checked_matrix(cfg, panel ? &*panel : nullptr);
  SelectKOptions o;
  o.k_min = cfg.k_min;
  o.k_max = std::min(cfg.k_max, m.size());
  o.algorithm = cfg.algorithm;
  o.kmeans = kmeans_options(cfg, cfg.k_min);
  o.workers = cfg.workers;
  const auto result = select_k(m, panel ? &*panel : nullptr, cfg.bootstrap(), o);

  write_file(cfg.out_dir / "select_k.csv", select_k_csv(result));
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    if (result.reports[i].k != result.best_k) continue;
    write_file(cfg.out_dir / "validity.json", validity_to_json(result.reports[i]));
    write_file(cfg.out_dir / "clustering.json", clustering_to_json(result.clusterings[i]));
  }
  log << "select-k: K*=" << result.best_k << " over [" << o.k_min << ", " << o.k_max << "] -> "
      << (cfg.out_dir / "select_k.csv").generic_string() << "\n";
}

void cmd_rank(const RunConfig& cfg, std::ostream& log) {
  const auto panel = load_panel(cfg);
  auto c = load_clustering(cfg);
  attach_centers(c, panel);
  const auto ranking = rank_centers(c, cfg.bootstrap(), cfg.alpha, cfg.workers);
  write_file(cfg.out_dir / "ranking.json", ranking_to_json(ranking));
  write_file(cfg.out_dir / "dominance.txt", dominance_table(ranking));
  write_file(cfg.out_dir / "optimal_pool.json",
             pool_to_json(members_of(c, ranking.optimal, panel), "optimal"));
  log << "rank: " << ranking.groups.size() << " equivalence groups, " << ranking.optimal.size()
      << " optimal clusters -> " << (cfg.out_dir / "ranking.json").generic_string() << "\n";
}

void cmd_refine(const RunConfig& cfg, std::ostream& log) {
  const auto panel = load_panel(cfg);
  auto c = load_clustering(cfg);
  attach_centers(c, panel);
  const auto ranking = ranking_from_json(read_file(require(cfg.ranking, "ranking")));
  if (ranking.k != c.k) throw DataError("ranking and clustering disagree on K");
  auto b = cfg.bootstrap(ranking.order.value());
  b.direction = ranking.direction;
  const auto pool = refine_pool(panel, c, ranking, b, ranking.alpha, cfg.workers);
  const auto path = cfg.out_dir / "pool.json";
  write_file(path, pool_to_json(pool, "refined"));
  log << "refine: " << pool.size() << " of " << panel.assets() << " assets retained -> "
      << path.generic_string() << "\n";
}

void cmd_portfolio(const RunConfig& cfg, std::ostream& log) {
  const auto panel = load_panel(cfg);
  const auto pool_a = read_pool(require(cfg.pool_a, "pool_a"));
  std::vector<std::string> pool_b;
  if (!cfg.pool_b.empty()) {
    pool_b = read_pool(cfg.pool_b);
  } else {
    const std::set<std::string> in_a(pool_a.begin(), pool_a.end());
    for (const auto& t : panel.tickers)
      if (!in_a.contains(t)) pool_b.push_back(t);
  }
  const auto seed = derive_seed(cfg.seed, {fnv1a("draws")});
  const auto summary = draw_experiment(panel, pool_a, pool_b, cfg.portfolio_size, cfg.draws, seed, cfg.workers);
  write_file(cfg.out_dir / "scatter.csv", scatter_csv(summary));

  ordered_json j;
  j["portfolio_size"] = cfg.portfolio_size;
  j["draws"] = cfg.draws;
  j["risk_measure"] = "variance";
  for (const auto* s : {&summary.a, &summary.b}) {
    j[s->label] = {{"size", s == &summary.a ? pool_a.size() : pool_b.size()},
                   {"mean_risk", s->mean_risk},
                   {"mean_return", s->mean_return},
                   {"sd_risk", s->sd_risk},
                   {"sd_return", s->sd_return}};
  }
  write_file(cfg.out_dir / "portfolio.json", j.dump(2) + "\n");

  std::optional<Clustering> c;
  if (!cfg.clustering.empty()) c = load_clustering(cfg);
  const auto market = market_series(panel);
  std::string ab = "ticker,alpha,beta,cluster\n";
  for (std::size_t i = 0; i < panel.assets(); ++i) {
    const auto est = alpha_beta(panel.columns[i], market);
    std::string label;
    if (c) {
      const auto it = std::find(c->tickers.begin(), c->tickers.end(), panel.tickers[i]);
      if (it != c->tickers.end()) label = std::to_string(c->labels[static_cast<std::size_t>(it - c->tickers.begin())]);
    }
    ab += panel.tickers[i] + "," + num(est.alpha) + "," + num(est.beta) + "," + label + "\n";
  }
  write_file(cfg.out_dir / "alpha_beta.csv", ab);
  log << "portfolio: mean risk A=" << num(summary.a.mean_risk) << " B=" << num(summary.b.mean_risk)
      << " -> " << (cfg.out_dir / "scatter.csv").generic_string() << "\n";
}

void cmd_heatmap(const RunConfig& cfg, std::ostream& log) {
  const auto m = load_matrix(require(cfg.matrix, "matrix"));
  std::vector<std::size_t> order(m.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> label(m.size(), 0);
  if (!cfg.clustering.empty()) {
    const auto c = load_clustering(cfg);
    for (std::size_t i = 0; i < m.size(); ++i) label[i] = c.label_of(m.tickers[i]);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(label[a], m.tickers[a]) < std::tie(label[b], m.tickers[b]);
  });
  const auto permuted = m.permuted(order);
  write_file(cfg.out_dir / "heatmap.ppm", heatmap_ppm(permuted, cfg.heatmap_scale));
  write_file(cfg.out_dir / "heatmap_matrix.csv", matrix_to_csv(permuted));
  log << "heatmap: " << m.size() << "x" << m.size() << " -> " << (cfg.out_dir / "heatmap.ppm").generic_string()
      << "\n";
}

namespace {

// Runs matrix, K choice, ranking, refinement and heatmap in `dir` at `order`.
// Returns false when the panel is too small to cluster.
bool run_stage(const RunConfig& base, const fs::path& dir, int order, const fs::path& pool,
               std::ostream& log) {
  RunConfig s = base;
  s.out_dir = dir;
  s.order = order;
  s.pool = pool;
  s.matrix = dir / "matrix.csv";
  s.clustering = dir / "clustering.json";
  s.ranking = dir / "ranking.json";
  const auto n = load_panel(s).assets();
  if (n <= s.k_min) return false;
  cmd_matrix(s, log);
  if (s.auto_k) {
    cmd_select_k(s, log);
  } else {
    s.k = std::min(s.k, n - 1);
    cmd_cluster(s, log);
  }
  cmd_rank(s, log);
  cmd_refine(s, log);
  cmd_heatmap(s, log);
  return true;
}

ordered_json stage_summary(const fs::path& dir) {
  const auto c = clustering_from_json(read_file(dir / "clustering.json"));
  const auto r = ranking_from_json(read_file(dir / "ranking.json"));
  ordered_json j;
  j["K"] = c.k;
  j["groups"] = r.groups;
  j["optimal_clusters"] = r.optimal;
  j["optimal_pool"] = read_pool(dir / "optimal_pool.json");
  j["refined_pool"] = read_pool(dir / "pool.json");
  return j;
}

}  // namespace

void cmd_pipeline(const RunConfig& cfg, std::ostream& log) {
  const auto panel = load_panel(cfg);
  if (panel.assets() <= cfg.k_min) {
    throw ConfigError("pipeline needs more than k_min (" + std::to_string(cfg.k_min) + ") assets");
  }
  const auto stage1 = cfg.out_dir / "stage1";
  const auto stage2 = cfg.out_dir / "stage2";
  run_stage(cfg, stage1, 1, cfg.pool, log);

  ordered_json manifest;
  manifest["tool"] = "sdcluster";
  manifest["root_seed"] = cfg.seed;
  auto config = ordered_json::object();
  for (const auto& [k, v] : cfg.entries()) config[k] = v;
  manifest["config"] = config;
  manifest["panel"] = {{"assets", panel.assets()},
                       {"periods", panel.periods_count()},
                       {"digest", panel_digest(panel)}};
  manifest["stage1"] = stage_summary(stage1);

  fs::path optimal = stage1 / "pool.json";
  const bool second = run_stage(cfg, stage2, 2, stage1 / "pool.json", log);
  if (second) {
    manifest["stage2"] = stage_summary(stage2);
    optimal = stage2 / "optimal_pool.json";
  } else {
    manifest["stage2"] = {{"skipped", "refined pool too small to cluster"}};
  }

  const auto pool_a = read_pool(optimal);
  const std::size_t rest = panel.assets() - pool_a.size();
  const std::size_t m = std::min({cfg.portfolio_size, pool_a.size(), rest});
  write_file(cfg.out_dir / "optimal_pool.json", pool_to_json(pool_a, "optimal"));
  if (m >= 2) {
    RunConfig p = cfg;
    p.pool_a = cfg.out_dir / "optimal_pool.json";
    p.pool_b.clear();
    p.clustering = stage1 / "clustering.json";
    p.portfolio_size = m;
    cmd_portfolio(p, log);
    manifest["portfolio"] = {{"portfolio_size", m}, {"draws", cfg.draws},
                             {"draw_seed", derive_seed(cfg.seed, {fnv1a("draws")})}};
  } else {
    manifest["portfolio"] = {{"skipped", "pools too small for a two-asset portfolio"}};
  }

  auto outputs = ordered_json::object();
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(cfg.out_dir))
    if (e.is_regular_file() && e.path().filename() != "manifest.json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    outputs[fs::relative(f, cfg.out_dir).generic_string()] = Fnv1a().add(read_file(f)).hex();
  }
  manifest["outputs"] = outputs;
  write_file(cfg.out_dir / "manifest.json", manifest.dump(2) + "\n");
  log << "pipeline: optimal pool of " << pool_a.size() << " assets -> "
      << (cfg.out_dir / "manifest.json").generic_string() << "\n";
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"synth",  "ingest",    "matrix",  "cluster",
                                                 "select-k", "rank",    "refine",  "portfolio",
                                                 "heatmap", "pipeline"};
  return names;
}

void run_command(std::string_view name, const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  if (name == "synth") cmd_synth(cfg, log);
  else if (name == "ingest") cmd_ingest(cfg, log);
  else if (name == "matrix") cmd_matrix(cfg, log);
  else if (name == "cluster") cmd_cluster(cfg, log);
  else if (name == "select-k") cmd_select_k(cfg, log);
  else if (name == "rank") cmd_rank(cfg, log);
  else if (name == "refine") cmd_refine(cfg, log);
  else if (name == "portfolio") cmd_portfolio(cfg, log);
  else if (name == "heatmap") cmd_heatmap(cfg, log);
  else if (name == "pipeline") cmd_pipeline(cfg, log);
  else throw ConfigError("unknown command '" + std::string(name) + "'");
}

}  // namespace sdclust::cli
