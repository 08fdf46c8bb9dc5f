#pragma once

#include <exception>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sdcluster/coefficient_matrix.hpp"
#include "sdcluster/market_data.hpp"
#include "sdcluster_cli/run_config.hpp"

namespace sdclust::cli {

/// Exit status for an escaped exception: 2 config, 3 data, 4 numerical, 1 other.
int exit_code_for(const std::exception& e) noexcept;

/// Returns from `returns`, or ingested from `prices`; restricted to `pool` when set.
ReturnPanel load_panel(const RunConfig& cfg);

std::vector<std::string> read_pool(const std::filesystem::path& path);
std::string pool_to_json(const std::vector<std::string>& tickers, std::string_view label);

/// Binary P6 image, gray = round(255 * (1 - value)), `scale` pixels per cell.
std::string heatmap_ppm(const SDMatrix& matrix, std::size_t scale = 1);

void cmd_synth(const RunConfig& cfg, std::ostream& log);
void cmd_ingest(const RunConfig& cfg, std::ostream& log);
void cmd_matrix(const RunConfig& cfg, std::ostream& log);
void cmd_cluster(const RunConfig& cfg, std::ostream& log);
void cmd_select_k(const RunConfig& cfg, std::ostream& log);
void cmd_rank(const RunConfig& cfg, std::ostream& log);
void cmd_refine(const RunConfig& cfg, std::ostream& log);
void cmd_portfolio(const RunConfig& cfg, std::ostream& log);
void cmd_heatmap(const RunConfig& cfg, std::ostream& log);
void cmd_pipeline(const RunConfig& cfg, std::ostream& log);

const std::vector<std::string>& command_names();
/// Validates the config and dispatches by name (`select-k` style names).
void run_command(std::string_view name, const RunConfig& cfg, std::ostream& log);

}  // namespace sdclust::cli
