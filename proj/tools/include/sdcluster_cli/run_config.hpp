#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdcluster/bootstrap.hpp"
#include "sdcluster/validity.hpp"

namespace sdclust::cli {

/// Every knob of a run. Loaded from a flat `key = value` file; command-line
/// flags of the same name override file values.
struct RunConfig {
  std::filesystem::path prices;
  std::filesystem::path returns;
  std::filesystem::path matrix;
  std::filesystem::path clustering;
  std::filesystem::path ranking;
  std::filesystem::path pool;      // restricts the panel to these tickers
  std::filesystem::path pool_a;
  std::filesystem::path pool_b;    // defaults to the complement of pool_a
  std::filesystem::path out_dir = "out";

  std::string frequency = "weekly";  // weekly | daily
  double min_coverage = 1.0;

  Direction direction = Direction::Ascending;
  int order = 1;
  std::size_t reps = 1000;
  std::size_t grid_points = kDefaultGridPoints;
  double var_floor = kDefaultVarFloor;
  double alpha = 0.05;

  Algorithm algorithm = Algorithm::Hierarchical;
  std::size_t k = 3;
  std::size_t k_min = 2;
  std::size_t k_max = 6;
  bool auto_k = true;
  std::size_t max_iter = 100;
  std::size_t iteration_reps = 300;
  std::size_t restarts = 10;

  std::size_t portfolio_size = 3;
  std::size_t draws = 100;
  std::size_t heatmap_scale = 1;

  std::string synth = "three-group";  // three-group | two-regime
  std::size_t synth_periods = 260;

  std::uint64_t seed = 20240601;
  int workers = 1;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
  BootstrapConfig bootstrap() const;
  BootstrapConfig bootstrap(int order_override) const;
  /// (key, value) pairs in a fixed order, as accepted by apply_setting.
  std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Keys accepted by apply_setting, in entries() order.
const std::vector<std::string>& setting_keys();

/// Throws ConfigError on unknown keys or unparsable values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

/// `#` starts a comment; blank lines are ignored.
RunConfig parse_run_config(std::string_view text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

}  // namespace sdclust::cli
