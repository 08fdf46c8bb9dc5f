#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "sdcluster/bootstrap.hpp"
#include "sdcluster/digest.hpp"

using namespace sdclust;

namespace {

BootstrapConfig config(std::size_t reps, std::uint64_t seed, int j = 1, Direction dir = Direction::Ascending) {
  BootstrapConfig c;
  c.reps = reps;
  c.seed = seed;
  c.order = SdOrder{j};
  c.direction = dir;
  return c;
}

}  // namespace

TEST(PooledResample, SinglePooledValue) {
  Rng rng(1);
  const auto [f, g] = pooled_resample(Series{5}, Series{5}, rng);
  EXPECT_EQ(f, Series{5});
  EXPECT_EQ(g, Series{5});
}

TEST(PooledResample, SupportAndSizes) {
  Rng rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    const auto [f, g] = pooled_resample(Series{1, 2}, Series{3}, rng);
    ASSERT_EQ(f.size(), 2u);
    ASSERT_EQ(g.size(), 1u);
    for (double v : f) EXPECT_TRUE(v == 1 || v == 2 || v == 3);
    for (double v : g) EXPECT_TRUE(v == 1 || v == 2 || v == 3);
  }
}

TEST(PooledResample, SeededDeterminism) {
  const auto f = oracle::normal_sample(1, 20, 0, 1);
  const auto g = oracle::normal_sample(2, 25, 0, 1);
  Rng a(99), b(99);
  EXPECT_EQ(pooled_resample(f, g, a), pooled_resample(f, g, b));
}

TEST(BootStat, IdenticalResamplesGiveZero) {
  const Series s{0.1, 0.4, 0.2, 0.9};
  const auto b = boot_stat(s, s, config(10, 0));
  EXPECT_EQ(b.value, 0.0);
  EXPECT_FALSE(b.degenerate);
}

TEST(BootStat, ConstantPoolIsDegenerate) {
  const auto b = boot_stat(Series{2, 2}, Series{2, 2, 2}, config(10, 0));
  EXPECT_EQ(b.value, 0.0);
  EXPECT_TRUE(b.degenerate);
}

TEST(BootStat, MatchesBruteForceOnSeededResample) {
  const Series f{1, 2, 3};
  const Series g{4, 5, 6};
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Rng rng(seed);
    const auto [fs, gs] = pooled_resample(f, g, rng);
    const auto got = boot_stat(fs, gs, config(1, 0));
    std::vector<double> pool = fs;
    pool.insert(pool.end(), gs.begin(), gs.end());
    const auto [lo, hi] = std::minmax_element(pool.begin(), pool.end());
    if (*lo == *hi) {
      EXPECT_TRUE(got.degenerate);
      continue;
    }
    const auto want = oracle::t_profile(fs, gs, oracle::open_grid(*lo, *hi, kDefaultGridPoints), 1,
                                        Direction::Ascending);
    EXPECT_GE(got.value, 0.0);
    EXPECT_NEAR(got.value, want.any ? want.max_abs : 0.0, 1e-12);
  }
}

TEST(PairTest, IdenticalSamples) {
  const auto s = oracle::normal_sample(3, 40, 0, 1);
  const auto r = pair_test(s, s, config(200, 7));
  EXPECT_EQ(r.t0_max_abs, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_EQ(r.coefficient, 0.0);
}

TEST(PairTest, LargeShiftIsDetected) {
  const auto g = oracle::uniform_sample(11, 200);
  const auto f = oracle::shifted(g, 5.0);
  const auto r = pair_test(f, g, config(500, 2024));
  EXPECT_GE(r.coefficient, 0.95);
}

TEST(PairTest, PValueCountsExceedances) {
  const auto f = oracle::normal_sample(5, 30, 0, 1);
  const auto g = oracle::normal_sample(6, 30, 0.3, 1);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = pair_test(f, g, config(4, seed), true);
    ASSERT_EQ(r.boot_stats.size(), 4u);
    const auto hits = std::count_if(r.boot_stats.begin(), r.boot_stats.end(),
                                    [&](double s) { return s >= r.t0_max_abs; });
    EXPECT_EQ(r.p_value, static_cast<double>(hits) / 4.0);
    EXPECT_EQ(r.coefficient, 1.0 - r.p_value);
  }
}

TEST(PairTest, Deterministic) {
  const auto f = oracle::normal_sample(8, 50, 0, 1);
  const auto g = oracle::normal_sample(9, 60, 0, 2);
  const auto a = pair_test(f, g, config(100, 42, 2), true);
  const auto b = pair_test(f, g, config(100, 42, 2), true);
  EXPECT_EQ(a.p_value, b.p_value);
  EXPECT_EQ(a.t0_max_abs, b.t0_max_abs);
  EXPECT_EQ(a.boot_stats, b.boot_stats);
}

TEST(PairTest, SymmetricInArguments) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto f = oracle::normal_sample(10 + s, 30 + s, 0, 1);
    const auto g = oracle::normal_sample(50 + s, 30, 0.2, 1.3);
    for (int j = 1; j <= 3; ++j) {
      const auto a = pair_test(f, g, config(60, s, j), true);
      const auto b = pair_test(g, f, config(60, s, j), true);
      EXPECT_EQ(a.t0_max_abs, b.t0_max_abs);
      EXPECT_EQ(a.p_value, b.p_value);
      EXPECT_EQ(a.boot_stats, b.boot_stats);
    }
  }
}

TEST(PairTest, GranularityAndRange) {
  const auto f = oracle::normal_sample(12, 30, 0, 1);
  const auto g = oracle::normal_sample(13, 30, 0.5, 1);
  const auto r = pair_test(f, g, config(37, 1));
  EXPECT_GE(r.p_value, 0.0);
  EXPECT_LE(r.p_value, 1.0);
  const double scaled = r.p_value * 37.0;
  EXPECT_NEAR(scaled, std::round(scaled), 1e-9);
}

TEST(PairTest, ConstantPairIsAnError) {
  EXPECT_THROW(pair_test(Series{1, 1}, Series{1, 1, 1}, config(10, 0)), NumericalError);
}

TEST(Replicates, MatchExplicitResamples) {
  const auto f = oracle::normal_sample(14, 25, 0, 1);
  const auto g = oracle::normal_sample(15, 25, 0, 1.5);
  for (int j = 1; j <= 3; ++j) {
    const auto cfg = config(30, 77, j);
    const auto reps = bootstrap_replicates(f, g, cfg);
    // Canonical roles put the sample with the smaller sorted values first.
    std::vector<double> sf = f, sg = g;
    std::sort(sf.begin(), sf.end());
    std::sort(sg.begin(), sg.end());
    const bool swapped = std::lexicographical_compare(sg.begin(), sg.end(), sf.begin(), sf.end());
    for (std::size_t k = 0; k < reps.size(); ++k) {
      Rng rng(derive_seed(cfg.seed, {k}));
      auto [a, b] = swapped ? pooled_resample(g, f, rng) : pooled_resample(f, g, rng);
      if (swapped) std::swap(a, b);
      const auto stat = boot_stat(a, b, cfg);
      EXPECT_NEAR(reps[k].max_abs, stat.value, 1e-9) << "j=" << j << " k=" << k;
      EXPECT_EQ(reps[k].degenerate, stat.degenerate);
    }
  }
}

TEST(CriticalValue, Examples) {
  EXPECT_EQ(critical_value(std::vector<double>{1, 2, 3, 4}, 0.25), 4.0);
  EXPECT_EQ(critical_value(std::vector<double>{7, 7, 7}, 0.3), 7.0);
  EXPECT_EQ(critical_value(std::vector<double>{7, 7, 7}, 0.9), 7.0);
  std::vector<double> many(1000);
  for (std::size_t i = 0; i < many.size(); ++i) many[i] = static_cast<double>(i);
  EXPECT_EQ(critical_value(many, 0.001), 999.0);
  EXPECT_EQ(critical_value(many, 0.01), 990.0);
  EXPECT_EQ(critical_value(many, 0.0001), 999.0);
}

TEST(CriticalValue, TailCountMatchesFloorRule) {
  const auto stats = oracle::uniform_sample(16, 500);
  for (double alpha : {0.01, 0.05, 0.1, 0.25}) {
    const double c = critical_value(stats, alpha);
    const auto at_or_above = std::count_if(stats.begin(), stats.end(), [&](double s) { return s >= c; });
    EXPECT_EQ(at_or_above, static_cast<long>(std::floor(500 * alpha + 1e-9)));
  }
}

TEST(CriticalValue, NonIncreasingInAlpha) {
  const auto stats = oracle::normal_sample(17, 300, 0, 1);
  double prev = 1e300;
  for (double alpha = 0.001; alpha < 0.99; alpha += 0.01) {
    const double c = critical_value(stats, alpha);
    EXPECT_LE(c, prev);
    prev = c;
  }
}

TEST(CriticalValue, RejectsBadInput) {
  EXPECT_THROW(critical_value(std::vector<double>{}, 0.05), ConfigError);
  EXPECT_THROW(critical_value(std::vector<double>{1}, 0.0), ConfigError);
  EXPECT_THROW(critical_value(std::vector<double>{1}, 1.0), ConfigError);
}

TEST(BootstrapConfigCheck, Validation) {
  auto c = config(0, 0);
  EXPECT_THROW(c.validate(), ConfigError);
  c.reps = 10;
  c.grid_points = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c.grid_points = 10;
  c.var_floor = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(StatisticGrid, StrictlyInsideRange) {
  const auto g = statistic_grid(-1.0, 1.0, 4);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_GT(g.front(), -1.0);
  EXPECT_LT(g.back(), 1.0);
  EXPECT_NEAR(g[1] - g[0], 0.4, 1e-15);
}
