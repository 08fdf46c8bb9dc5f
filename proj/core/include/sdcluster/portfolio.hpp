#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sdcluster/market_data.hpp"
#include "sdcluster/types.hpp"

namespace sdclust {

struct PortfolioStats {
  std::vector<std::string> tickers;
  std::vector<double> weights;  // sum to 1
  double exp_return = 0.0;      // per-period mean return
  double risk = 0.0;            // per-period return variance
  double ridge = 0.0;           // diagonal loading applied, 0 when none
};

/// Sample covariance (denominator T - 1) of equally long series.
Matrix sample_covariance(const std::vector<SeriesView>& series);

/// w = Σ⁻¹1 / (1ᵀΣ⁻¹1). If Σ is not numerically positive definite the
/// diagonal is loaded with 1e-8·trace/n; the amount is written to `ridge`.
std::vector<double> gmvp_weights(const Matrix& cov, double* ridge = nullptr);

/// Unconstrained global minimum-variance portfolio from in-sample moments.
PortfolioStats gmvp(const ReturnPanel& panel, const std::vector<std::string>& tickers);

struct AlphaBeta {
  double alpha = 0.0;
  double beta = 0.0;
  double alpha_se = 0.0;
  double beta_se = 0.0;
};

/// OLS of asset on market. Throws NumericalError if the market is constant.
AlphaBeta alpha_beta(SeriesView asset, SeriesView market);

/// Equal-weight mean return of all panel assets per period.
Series market_series(const ReturnPanel& panel);

struct DrawPoint {
  std::size_t draw = 0;
  double risk = 0.0;
  double exp_return = 0.0;
};

struct PoolSummary {
  std::string label;
  double mean_risk = 0.0;
  double mean_return = 0.0;
  double sd_risk = 0.0;
  double sd_return = 0.0;
  std::vector<DrawPoint> points;
};

struct DrawSummary {
  PoolSummary a;
  PoolSummary b;
};

/// For each pool, `draws` uniform m-subsets without replacement, a GMVP per
/// subset, and the mean/spread of (risk, return). Draw d of both pools uses
/// the same derived stream, so identical pools give identical summaries.
DrawSummary draw_experiment(const ReturnPanel& panel, const std::vector<std::string>& pool_a,
                            const std::vector<std::string>& pool_b, std::size_t m,
                            std::size_t draws, std::uint64_t seed, int workers = 1);

/// `pool,draw,risk,exp_return`
std::string scatter_csv(const DrawSummary& summary);

}  // namespace sdclust
