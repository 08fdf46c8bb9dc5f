#include <benchmark/benchmark.h>

#include <random>

#include "sdcluster/bootstrap.hpp"
#include "sdcluster/coefficient_matrix.hpp"
#include "sdcluster/sd_core.hpp"

using namespace sdclust;

namespace {

Series normal(std::uint64_t seed, std::size_t n, double mean, double sd) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d(mean, sd);
  Series out(n);
  for (auto& v : out) v = d(gen);
  return out;
}

ReturnPanel panel(std::size_t assets, std::size_t periods) {
  ReturnPanel p;
  const std::chrono::sys_days start{std::chrono::year{2020} / std::chrono::January / 3};
  for (std::size_t t = 0; t < periods; ++t) p.periods.emplace_back(start + std::chrono::days{7 * static_cast<long>(t)});
  for (std::size_t i = 0; i < assets; ++i) {
    p.tickers.push_back("A" + std::to_string(i));
    p.columns.push_back(normal(i, periods, 0.001 * static_cast<double>(i % 3), 0.02));
  }
  return p;
}

void BM_StatProfile(benchmark::State& state) {
  const auto f = normal(1, static_cast<std::size_t>(state.range(0)), 0.0, 1.0);
  const auto g = normal(2, static_cast<std::size_t>(state.range(0)), 0.1, 1.2);
  const Grid grid = make_grid(Sample(f), Sample(g), kDefaultGridPoints);
  const SdOrder j{static_cast<int>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(stat_profile(f, g, grid.points(), j, Direction::Ascending));
}
BENCHMARK(BM_StatProfile)->ArgsProduct({{100, 260, 1000}, {1, 2, 3}});

void BM_PairTest(benchmark::State& state) {
  const auto f = normal(3, 260, 0.0, 0.02);
  const auto g = normal(4, 260, 0.001, 0.03);
  BootstrapConfig cfg;
  cfg.reps = static_cast<std::size_t>(state.range(0));
  cfg.order = SdOrder{static_cast<int>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(pair_test(f, g, cfg));
}
BENCHMARK(BM_PairTest)->ArgsProduct({{300, 1000}, {1, 2}})->Unit(benchmark::kMillisecond);

void BM_BuildMatrix(benchmark::State& state) {
  const auto p = panel(static_cast<std::size_t>(state.range(0)), 260);
  BootstrapConfig cfg;
  cfg.reps = 200;
  for (auto _ : state) benchmark::DoNotOptimize(build_matrix(p, cfg, static_cast<int>(state.range(1))));
}
BENCHMARK(BM_BuildMatrix)->ArgsProduct({{8, 16}, {1, 4}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
