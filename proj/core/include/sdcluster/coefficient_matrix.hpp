#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "sdcluster/bootstrap.hpp"
#include "sdcluster/market_data.hpp"
#include "sdcluster/types.hpp"

namespace sdclust {

/// Symmetric matrix of SD coefficients with zero diagonal.
struct SDMatrix {
  std::vector<std::string> tickers;
  SdOrder order{1};
  Direction direction = Direction::Ascending;
  Matrix values;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  std::size_t grid_points = 0;
  std::string panel_digest;
  std::string config_digest;

  std::size_t size() const noexcept { return tickers.size(); }
  double operator()(std::size_t i, std::size_t k) const { return values(i, k); }
  /// Throws DataError unless square, symmetric (1e-12), zero-diagonal and in [0, 1].
  void validate() const;
  /// Same matrix with rows/columns reordered.
  SDMatrix permuted(const std::vector<std::size_t>& order) const;
};

/// Seed used for the unordered pair {a, b}; independent of argument order.
/// Both directions share it, so first-order ascending and descending
/// matrices draw the same resamples.
std::uint64_t pair_seed(std::uint64_t root, std::string_view a, std::string_view b, SdOrder j);

std::string config_digest(const BootstrapConfig& cfg, const std::string& panel_digest);

/// One pair test per unordered pair, mirrored; diagonal fixed at 0.
/// Work items run on `workers` threads; the result does not depend on it.
SDMatrix build_matrix(const ReturnPanel& panel, const BootstrapConfig& cfg, int workers = 1,
                      const std::function<void(std::size_t done, std::size_t total)>& progress = {});

/// Wraps an explicit matrix (e.g. hand-built distances) and validates it.
SDMatrix make_sd_matrix(std::vector<std::string> tickers, Matrix values, SdOrder j = SdOrder{1},
                        Direction dir = Direction::Ascending);

std::string matrix_to_csv(const SDMatrix& m);
SDMatrix parse_matrix_csv(std::string_view text);
void save_matrix(const SDMatrix& m, const std::filesystem::path& path);
SDMatrix load_matrix(const std::filesystem::path& path);

/// True when the matrix was computed from a panel with this digest.
bool matches_panel(const SDMatrix& m, const ReturnPanel& panel);

}  // namespace sdclust
