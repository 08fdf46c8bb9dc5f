#include "sdcluster_cli/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <algorithm>
#include <charconv>

namespace sdclust::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("invalid boolean '" + std::string(value) + "' for " + std::string(key));
}

std::string num(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

void RunConfig::validate() const {
  if (frequency != "weekly" && frequency != "daily") {
    throw ConfigError("frequency must be weekly or daily");
  }
  if (!(min_coverage > 0.0 && min_coverage <= 1.0)) throw ConfigError("min_coverage must lie in (0, 1]");
  (void)SdOrder(order);
  bootstrap().validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (k < 2) throw ConfigError("k must be at least 2");
  if (k_min < 2 || k_min > k_max) throw ConfigError("need 2 <= k_min <= k_max");
  if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (restarts < 1) throw ConfigError("restarts must be at least 1");
  if (portfolio_size < 2) throw ConfigError("portfolio_size must be at least 2");
  if (draws < 1) throw ConfigError("draws must be at least 1");
  if (heatmap_scale < 1) throw ConfigError("heatmap_scale must be at least 1");
  if (synth != "three-group" && synth != "two-regime") {
    throw ConfigError("synth must be three-group or two-regime");
  }
  if (synth_periods < 10) throw ConfigError("synth_periods must be at least 10");
  if (workers < 1) throw ConfigError("workers must be at least 1");
}

BootstrapConfig RunConfig::bootstrap() const { return bootstrap(order); }

BootstrapConfig RunConfig::bootstrap(int order_override) const {
  BootstrapConfig b;
  b.reps = reps;
  b.seed = seed;
  b.grid_points = grid_points;
  b.var_floor = var_floor;
  b.order = SdOrder(order_override);
  b.direction = direction;
  return b;
}

const std::vector<std::string>& setting_keys() {
  static const std::vector<std::string> keys = {
      "prices",     "returns",        "matrix",         "clustering",  "ranking",
      "pool",       "pool_a",         "pool_b",         "out_dir",     "frequency",
      "min_coverage", "direction",    "order",          "reps",        "grid_points",
      "var_floor",  "alpha",          "algorithm",      "k",           "k_min",
      "k_max",      "auto_k",         "max_iter",       "iteration_reps", "restarts", "portfolio_size",
      "draws",      "heatmap_scale",  "synth",          "synth_periods", "seed",
      "workers"};
  return keys;
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  return {{"prices", prices.generic_string()},
          {"returns", returns.generic_string()},
          {"matrix", matrix.generic_string()},
          {"clustering", clustering.generic_string()},
          {"ranking", ranking.generic_string()},
          {"pool", pool.generic_string()},
          {"pool_a", pool_a.generic_string()},
          {"pool_b", pool_b.generic_string()},
          {"out_dir", out_dir.generic_string()},
          {"frequency", frequency},
          {"min_coverage", num(min_coverage)},
          {"direction", std::string(to_string(direction))},
          {"order", std::to_string(order)},
          {"reps", std::to_string(reps)},
          {"grid_points", std::to_string(grid_points)},
          {"var_floor", num(var_floor)},
          {"alpha", num(alpha)},
          {"algorithm", std::string(to_string(algorithm))},
          {"k", std::to_string(k)},
          {"k_min", std::to_string(k_min)},
          {"k_max", std::to_string(k_max)},
          {"auto_k", auto_k ? "true" : "false"},
          {"max_iter", std::to_string(max_iter)},
          {"iteration_reps", std::to_string(iteration_reps)},
          {"restarts", std::to_string(restarts)},
          {"portfolio_size", std::to_string(portfolio_size)},
          {"draws", std::to_string(draws)},
          {"heatmap_scale", std::to_string(heatmap_scale)},
          {"synth", synth},
          {"synth_periods", std::to_string(synth_periods)},
          {"seed", std::to_string(seed)},
          {"workers", std::to_string(workers)}};
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view raw) {
  const auto value = trim(raw);
  const std::string v(value);
  if (key == "prices") cfg.prices = v;
  else if (key == "returns") cfg.returns = v;
  else if (key == "matrix") cfg.matrix = v;
  else if (key == "clustering") cfg.clustering = v;
  else if (key == "ranking") cfg.ranking = v;
  else if (key == "pool") cfg.pool = v;
  else if (key == "pool_a") cfg.pool_a = v;
  else if (key == "pool_b") cfg.pool_b = v;
  else if (key == "out_dir") cfg.out_dir = v;
  else if (key == "frequency") cfg.frequency = v;
  else if (key == "min_coverage") cfg.min_coverage = parse_number<double>(key, value);
  else if (key == "direction") cfg.direction = parse_direction(value);
  else if (key == "order") cfg.order = parse_number<int>(key, value);
  else if (key == "reps") cfg.reps = parse_number<std::size_t>(key, value);
  else if (key == "grid_points") cfg.grid_points = parse_number<std::size_t>(key, value);
  else if (key == "var_floor") cfg.var_floor = parse_number<double>(key, value);
  else if (key == "alpha") cfg.alpha = parse_number<double>(key, value);
  else if (key == "algorithm") cfg.algorithm = parse_algorithm(value);
  else if (key == "k") cfg.k = parse_number<std::size_t>(key, value);
  else if (key == "k_min") cfg.k_min = parse_number<std::size_t>(key, value);
  else if (key == "k_max") cfg.k_max = parse_number<std::size_t>(key, value);
  else if (key == "auto_k") cfg.auto_k = parse_bool(key, value);
  else if (key == "max_iter") cfg.max_iter = parse_number<std::size_t>(key, value);
  else if (key == "iteration_reps") cfg.iteration_reps = parse_number<std::size_t>(key, value);
  else if (key == "restarts") cfg.restarts = parse_number<std::size_t>(key, value);
  else if (key == "portfolio_size") cfg.portfolio_size = parse_number<std::size_t>(key, value);
  else if (key == "draws") cfg.draws = parse_number<std::size_t>(key, value);
  else if (key == "heatmap_scale") cfg.heatmap_scale = parse_number<std::size_t>(key, value);
  else if (key == "synth") cfg.synth = v;
  else if (key == "synth_periods") cfg.synth_periods = parse_number<std::size_t>(key, value);
  else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "workers") cfg.workers = parse_number<int>(key, value);
  else throw ConfigError("unknown setting '" + std::string(key) + "'");
}

RunConfig parse_run_config(std::string_view text, RunConfig base) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), std::move(base));
}

}  // namespace sdclust::cli
