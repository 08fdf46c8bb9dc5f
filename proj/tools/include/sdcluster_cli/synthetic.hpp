#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sdcluster/market_data.hpp"

namespace sdclust::cli {

/// Assets r_it = mean + sd * (rho * f_gt + sqrt(1 - rho^2) * e_it), where f_gt
/// is a factor shared by the group and e_it is idiosyncratic noise.
struct GroupSpec {
  std::string prefix;
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.01;
  double rho = 0.0;
};

/// Weekly periods starting at `start`; tickers are prefix + two-digit index.
ReturnPanel synthetic_returns(const std::vector<GroupSpec>& groups, std::size_t periods,
                              std::uint64_t seed, Date start = Date{std::chrono::year{2015},
                                                                    std::chrono::January,
                                                                    std::chrono::day{9}});

/// Prices starting at `start_price` one week before the first period.
PricePanel prices_from_returns(const ReturnPanel& panel, double start_price = 100.0);

/// `date,ticker,close` long format, rows by date then ticker.
std::string prices_to_csv(const PricePanel& panel);

/// Twelve assets in three regimes: calm, volatile, and high-drift.
std::vector<GroupSpec> three_group_spec();
/// Eight low-volatility and eight high-volatility, higher-drift assets.
std::vector<GroupSpec> two_regime_spec();

/// Ticker -> group index for panels built from `groups`.
std::vector<std::size_t> group_labels(const std::vector<GroupSpec>& groups);

}  // namespace sdclust::cli
