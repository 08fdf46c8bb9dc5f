#include "sdcluster/portfolio.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "sdcluster/digest.hpp"
#include "sdcluster/parallel.hpp"
#include "sdcluster/rng.hpp"
#include "text_util.hpp"

namespace sdclust {

using detail::format_double;

Matrix sample_covariance(const std::vector<SeriesView>& series) {
  const std::size_t n = series.size();
  if (n == 0) throw DataError("covariance needs at least one series");
  const std::size_t t = series.front().size();
  if (t < 2) throw DataError("covariance needs at least two periods");
  std::vector<double> mean(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (series[i].size() != t) throw DataError("series have different lengths");
    mean[i] = std::accumulate(series[i].begin(), series[i].end(), 0.0) / static_cast<double>(t);
  }
  Matrix cov(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i; k < n; ++k) {
      double s = 0.0;
      for (std::size_t p = 0; p < t; ++p) s += (series[i][p] - mean[i]) * (series[k][p] - mean[k]);
      cov(i, k) = cov(k, i) = s / static_cast<double>(t - 1);
    }
  }
  return cov;
}

namespace {

// Pivots below this fraction of the largest variance count as singular.
constexpr double kPivotTolerance = 1e-12;

bool solve_spd(const Eigen::MatrixXd& a, Eigen::VectorXd& x) {
  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return false;
  const double scale = a.diagonal().maxCoeff();
  const Eigen::VectorXd pivots = llt.matrixL().toDenseMatrix().diagonal().array().square();
  if (!(pivots.minCoeff() > kPivotTolerance * scale)) return false;
  x = llt.solve(Eigen::VectorXd::Ones(a.rows()));
  return x.allFinite();
}

}  // namespace

std::vector<double> gmvp_weights(const Matrix& cov, double* ridge) {
  const std::size_t n = cov.rows();
  if (n == 0 || cov.cols() != n) throw DataError("covariance must be square and non-empty");
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) a(i, k) = cov(i, k);
  const double trace = a.trace();
  if (!(trace > 0.0)) throw NumericalError("covariance has zero trace");

  Eigen::VectorXd x;
  double lambda = 0.0;
  if (!solve_spd(a, x)) {
    lambda = 1e-8 * trace / static_cast<double>(n);
    a.diagonal().array() += lambda;
    if (!solve_spd(a, x)) throw NumericalError("covariance is not positive definite after diagonal loading");
  }
  if (ridge != nullptr) *ridge = lambda;
  const double total = x.sum();
  if (!(std::abs(total) > 0.0)) throw NumericalError("minimum-variance weights are undefined");
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = x[static_cast<Eigen::Index>(i)] / total;
  return w;
}

PortfolioStats gmvp(const ReturnPanel& panel, const std::vector<std::string>& tickers) {
  if (tickers.size() < 2) throw ConfigError("a portfolio needs at least two assets");
  std::vector<SeriesView> series;
  for (const auto& t : tickers) series.emplace_back(panel.columns[panel.index_of(t)]);
  const Matrix cov = sample_covariance(series);

  PortfolioStats out;
  out.tickers = tickers;
  out.weights = gmvp_weights(cov, &out.ridge);
  const std::size_t n = tickers.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double mean = std::accumulate(series[i].begin(), series[i].end(), 0.0) /
                        static_cast<double>(series[i].size());
    out.exp_return += out.weights[i] * mean;
    for (std::size_t k = 0; k < n; ++k) out.risk += out.weights[i] * cov(i, k) * out.weights[k];
  }
  out.risk = std::max(out.risk, 0.0);
  return out;
}

AlphaBeta alpha_beta(SeriesView asset, SeriesView market) {
  const std::size_t t = asset.size();
  if (market.size() != t) throw DataError("asset and market series have different lengths");
  if (t < 3) throw DataError("alpha/beta regression needs at least three periods");
  const double n = static_cast<double>(t);
  const double mx = std::accumulate(market.begin(), market.end(), 0.0) / n;
  const double my = std::accumulate(asset.begin(), asset.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t p = 0; p < t; ++p) {
    sxx += (market[p] - mx) * (market[p] - mx);
    sxy += (market[p] - mx) * (asset[p] - my);
  }
  if (!(sxx > 0.0)) throw NumericalError("market series has zero variance");

  AlphaBeta out;
  out.beta = sxy / sxx;
  out.alpha = my - out.beta * mx;
  double ssr = 0.0;
  for (std::size_t p = 0; p < t; ++p) {
    const double e = asset[p] - out.alpha - out.beta * market[p];
    ssr += e * e;
  }
  const double s2 = ssr / (n - 2.0);
  out.beta_se = std::sqrt(s2 / sxx);
  out.alpha_se = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  return out;
}

Series market_series(const ReturnPanel& panel) {
  std::vector<std::size_t> all(panel.assets());
  std::iota(all.begin(), all.end(), 0);
  return mean_series(panel, all);
}

namespace {

void summarise(PoolSummary& s) {
  const double n = static_cast<double>(s.points.size());
  for (const auto& p : s.points) {
    s.mean_risk += p.risk;
    s.mean_return += p.exp_return;
  }
  s.mean_risk /= n;
  s.mean_return /= n;
  if (s.points.size() < 2) return;
  double vr = 0.0;
  double vm = 0.0;
  for (const auto& p : s.points) {
    vr += (p.risk - s.mean_risk) * (p.risk - s.mean_risk);
    vm += (p.exp_return - s.mean_return) * (p.exp_return - s.mean_return);
  }
  s.sd_risk = std::sqrt(vr / (n - 1.0));
  s.sd_return = std::sqrt(vm / (n - 1.0));
}

PoolSummary run_pool(const ReturnPanel& panel, const std::vector<std::string>& pool, std::string label,
                     std::size_t m, std::size_t draws, std::uint64_t seed, int workers) {
  PoolSummary s;
  s.label = std::move(label);
  s.points.resize(draws);
  parallel_for(draws, workers, [&](std::size_t d) {
    Rng rng(derive_seed(seed, {d}));
    std::vector<std::string> subset;
    for (std::size_t i : sample_without_replacement(rng, pool.size(), m)) subset.push_back(pool[i]);
    const auto stats = gmvp(panel, subset);
    s.points[d] = {d, stats.risk, stats.exp_return};
  });
  summarise(s);
  return s;
}

}  // namespace

DrawSummary draw_experiment(const ReturnPanel& panel, const std::vector<std::string>& pool_a,
                            const std::vector<std::string>& pool_b, std::size_t m, std::size_t draws,
                            std::uint64_t seed, int workers) {
  if (m < 2) throw ConfigError("portfolio size must be at least 2");
  if (draws < 1) throw ConfigError("draws must be at least 1");
  if (pool_a.size() < m || pool_b.size() < m) {
    throw DataError("pool too small: sizes " + std::to_string(pool_a.size()) + " and " +
                    std::to_string(pool_b.size()) + " for portfolio size " + std::to_string(m));
  }
  for (const auto* pool : {&pool_a, &pool_b})
    for (const auto& t : *pool) (void)panel.index_of(t);
  DrawSummary out;
  out.a = run_pool(panel, pool_a, "A", m, draws, seed, workers);
  out.b = run_pool(panel, pool_b, "B", m, draws, seed, workers);
  return out;
}

std::string scatter_csv(const DrawSummary& summary) {
  std::string out = "pool,draw,risk,exp_return\n";
  for (const auto* s : {&summary.a, &summary.b}) {
    for (const auto& p : s->points) {
      out += s->label + "," + std::to_string(p.draw) + "," + format_double(p.risk) + "," +
             format_double(p.exp_return) + "\n";
    }
  }
  return out;
}

}  // namespace sdclust
