#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdcluster/types.hpp"

namespace sdclust {

using Date = std::chrono::year_month_day;

/// Parses a strict YYYY-MM-DD date. Throws DataError otherwise.
Date parse_date(std::string_view text);
std::string format_date(Date d);

/// ISO-8601 week key (ISO year, week number 1..53).
struct IsoWeek {
  int year;
  unsigned week;
  friend auto operator<=>(const IsoWeek&, const IsoWeek&) = default;
};
IsoWeek iso_week(Date d);

/// Closing prices with possibly missing cells. Row = date, column = asset.
struct PricePanel {
  std::vector<Date> dates;
  std::vector<std::string> tickers;
  std::vector<std::vector<std::optional<double>>> prices;  // [row][col]

  std::size_t rows() const noexcept { return dates.size(); }
  std::size_t cols() const noexcept { return tickers.size(); }
  std::size_t missing_count() const noexcept;
  /// Throws DataError when dates are not strictly increasing, tickers repeat,
  /// shapes disagree, or a present price is not strictly positive.
  void validate() const;
};

/// Balanced panel of log returns, stored column-wise (one series per asset).
struct ReturnPanel {
  std::vector<Date> periods;
  std::vector<std::string> tickers;
  std::vector<Series> columns;

  std::size_t periods_count() const noexcept { return periods.size(); }
  std::size_t assets() const noexcept { return tickers.size(); }
  const Series& series(std::size_t asset) const { return columns.at(asset); }
  /// Column index for a ticker; throws DataError when absent.
  std::size_t index_of(std::string_view ticker) const;
  /// Sub-panel with the given tickers, in the given order.
  ReturnPanel select(const std::vector<std::string>& subset) const;
  void validate() const;
};

/// Summary of what log_returns dropped to reach a balanced panel.
struct FilterReport {
  std::vector<std::string> dropped_tickers;
  std::vector<double> dropped_coverage;  // parallel to dropped_tickers
  std::size_t dropped_rows = 0;
};

/// Reads `date,ticker,close` long-format CSV. Rows are sorted by date on
/// return; duplicate (date, ticker) keys and non-positive prices are errors.
PricePanel load_prices(const std::filesystem::path& path);
PricePanel parse_prices_csv(std::string_view text);

/// One row per ISO week holding the last available close of each asset
/// within that week. The row is dated by the week's last observed date.
PricePanel to_weekly(const PricePanel& panel);

/// r_t = ln(p_t / p_{t-1}) over consecutive retained rows after dropping
/// assets whose coverage is below `min_coverage` and then any row that still
/// has a missing cell.
ReturnPanel log_returns(const PricePanel& panel, double min_coverage = 1.0,
                        FilterReport* report = nullptr);

/// `period,<t1>,...` CSV with round-trip precision.
void save_returns(const ReturnPanel& panel, const std::filesystem::path& path);
ReturnPanel load_returns(const std::filesystem::path& path);
std::string returns_to_csv(const ReturnPanel& panel);
ReturnPanel parse_returns_csv(std::string_view text);

/// Digest over tickers, dates and the exact bit patterns of every return.
std::string panel_digest(const ReturnPanel& panel);

/// Per-period arithmetic mean of the given columns.
Series mean_series(const ReturnPanel& panel, const std::vector<std::size_t>& members);

}  // namespace sdclust
