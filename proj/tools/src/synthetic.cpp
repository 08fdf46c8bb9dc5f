#include "sdcluster_cli/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "sdcluster/digest.hpp"
#include "sdcluster/rng.hpp"

namespace sdclust::cli {

ReturnPanel synthetic_returns(const std::vector<GroupSpec>& groups, std::size_t periods,
                              std::uint64_t seed, Date start) {
  if (periods < 2) throw ConfigError("synthetic panel needs at least two periods");
  ReturnPanel panel;
  for (const auto& g : groups) {
    if (g.count == 0 || !(g.sd > 0.0) || g.rho < 0.0 || g.rho > 1.0) {
      throw ConfigError("invalid synthetic group '" + g.prefix + "'");
    }
    for (std::size_t i = 0; i < g.count; ++i) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "%02zu", i + 1);
      panel.tickers.push_back(g.prefix + buf);
      panel.columns.emplace_back();
    }
  }
  Rng rng(derive_seed(seed, {fnv1a("synthetic")}));
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::chrono::sys_days first{start};
  for (std::size_t t = 0; t < periods; ++t) {
    panel.periods.emplace_back(first + std::chrono::days{7 * static_cast<long>(t)});
    std::size_t col = 0;
    for (const auto& g : groups) {
      const double factor = normal(rng);
      const double idio = std::sqrt(1.0 - g.rho * g.rho);
      for (std::size_t i = 0; i < g.count; ++i, ++col) {
        panel.columns[col].push_back(g.mean + g.sd * (g.rho * factor + idio * normal(rng)));
      }
    }
  }
  panel.validate();
  return panel;
}

PricePanel prices_from_returns(const ReturnPanel& panel, double start_price) {
  PricePanel out;
  out.tickers = panel.tickers;
  const std::chrono::sys_days first{panel.periods.front()};
  out.dates.emplace_back(first - std::chrono::days{7});
  out.dates.insert(out.dates.end(), panel.periods.begin(), panel.periods.end());
  std::vector<double> level(panel.assets(), start_price);
  out.prices.emplace_back(level.begin(), level.end());
  for (std::size_t t = 0; t < panel.periods_count(); ++t) {
    std::vector<std::optional<double>> row;
    for (std::size_t a = 0; a < panel.assets(); ++a) {
      level[a] *= std::exp(panel.columns[a][t]);
      row.emplace_back(level[a]);
    }
    out.prices.push_back(std::move(row));
  }
  return out;
}

std::string prices_to_csv(const PricePanel& panel) {
  std::string out = "date,ticker,close\n";
  char buf[64];
  for (std::size_t r = 0; r < panel.rows(); ++r) {
    const auto date = format_date(panel.dates[r]);
    for (std::size_t c = 0; c < panel.cols(); ++c) {
      if (!panel.prices[r][c]) continue;
      std::snprintf(buf, sizeof buf, "%.10g", *panel.prices[r][c]);
      out += date + "," + panel.tickers[c] + "," + buf + "\n";
    }
  }
  return out;
}

std::vector<GroupSpec> three_group_spec() {
  return {{"CALM", 4, 0.0, 0.01, 0.99}, {"VOLA", 4, 0.0, 0.04, 0.99}, {"GROW", 4, 0.03, 0.02, 0.99}};
}

std::vector<GroupSpec> two_regime_spec() {
  return {{"LOW", 8, 0.001, 0.01, 0.3}, {"HIGH", 8, 0.004, 0.05, 0.3}};
}

std::vector<std::size_t> group_labels(const std::vector<GroupSpec>& groups) {
  std::vector<std::size_t> out;
  for (std::size_t g = 0; g < groups.size(); ++g) out.insert(out.end(), groups[g].count, g);
  return out;
}

}  // namespace sdclust::cli
