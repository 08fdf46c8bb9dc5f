#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sdcluster/clustering.hpp"
#include "sdcluster/sd_hierarchical.hpp"
#include "sdcluster/sd_kmeans.hpp"

using namespace sdclust;

namespace {

BootstrapConfig config(std::size_t reps, std::uint64_t seed, int j = 1) {
  BootstrapConfig c;
  c.reps = reps;
  c.seed = seed;
  c.order = SdOrder{j};
  return c;
}

KMeansOptions kmeans(std::size_t k, std::uint64_t seed, std::size_t iteration_reps = 100) {
  KMeansOptions o;
  o.k = k;
  o.seed = seed;
  o.iteration_reps = iteration_reps;
  return o;
}

// Two pairs of near-duplicates, one pair shifted far from the other.
ReturnPanel paired_panel() {
  const auto a = oracle::normal_sample(1, 120, 0, 1);
  const auto b = oracle::normal_sample(2, 120, 0, 1);
  const auto noise = oracle::normal_sample(3, 120, 0, 0.001);
  auto a2 = a;
  auto b2 = b;
  for (std::size_t i = 0; i < a.size(); ++i) {
    a2[i] += noise[i];
    b2[i] = b2[i] + 6.0 - noise[i];
  }
  return oracle::make_panel({a, oracle::shifted(b, 6.0), a2, b2}, {"A1", "B1", "A2", "B2"});
}

SDMatrix block_matrix(const std::vector<std::size_t>& blocks, double intra, double inter) {
  std::vector<std::string> tickers;
  const std::size_t n = blocks.size();
  for (std::size_t i = 0; i < n; ++i) tickers.push_back("T" + std::to_string(10 + i));
  Matrix v(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (i != k) v(i, k) = blocks[i] == blocks[k] ? intra : inter;
  return make_sd_matrix(tickers, v);
}

SDMatrix random_matrix(std::size_t n, std::uint64_t seed) {
  const auto u = oracle::uniform_sample(seed, n * n);
  Matrix v(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k) v(i, k) = v(k, i) = u[i * n + k];
  std::vector<std::string> tickers;
  for (std::size_t i = 0; i < n; ++i) tickers.push_back("X" + std::to_string(i));
  return make_sd_matrix(tickers, v);
}

}  // namespace

TEST(ClusteringType, MembersAndValidation) {
  Clustering c;
  c.tickers = {"A", "B", "C"};
  c.labels = {1, 0, 1};
  c.k = 2;
  c.validate();
  EXPECT_EQ(c.member_tickers(1), (std::vector<std::string>{"A", "C"}));
  EXPECT_EQ(c.label_of("B"), 0u);
  EXPECT_THROW(c.label_of("Z"), DataError);
  c.k = 3;
  EXPECT_THROW(c.validate(), DataError);
}

TEST(ClusteringType, JsonRoundTrip) {
  Clustering c;
  c.tickers = {"A", "B", "C"};
  c.labels = {1, 0, 1};
  c.k = 2;
  c.iterations_used = 4;
  c.converged = false;
  const auto back = clustering_from_json(clustering_to_json(c));
  EXPECT_EQ(back.tickers, c.tickers);
  EXPECT_EQ(back.labels, c.labels);
  EXPECT_EQ(back.k, 2u);
  EXPECT_EQ(back.iterations_used, 4u);
  EXPECT_FALSE(back.converged);
  EXPECT_EQ(partition_of(back), partition_of(c));
}

TEST(ClusteringType, CentersAreMemberMeans) {
  const auto panel = oracle::make_panel({{1, 2}, {3, 4}, {10, 20}}, {"A", "B", "C"});
  Clustering c;
  c.tickers = {"A", "B", "C"};
  c.labels = {0, 0, 1};
  c.k = 2;
  attach_centers(c, panel);
  EXPECT_EQ(c.centers[0], (Series{2, 3}));
  EXPECT_EQ(c.centers[1], (Series{10, 20}));
}

TEST(SdKMeans, RecoversDuplicatedPairs) {
  const auto panel = paired_panel();
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto c = sd_kmeans(panel, config(200, seed), kmeans(2, seed));
    EXPECT_EQ(partition_of(c), (std::set<std::set<std::string>>{{"A1", "A2"}, {"B1", "B2"}}));
    EXPECT_TRUE(c.converged);
  }
}

TEST(SdKMeans, KEqualsNGivesSingletons) {
  const auto panel = paired_panel();
  const auto c = sd_kmeans(panel, config(100, 1), kmeans(4, 9));
  EXPECT_EQ(partition_of(c).size(), 4u);
  EXPECT_LE(c.iterations_used, 2u);
  for (double d : c.member_distance) EXPECT_EQ(d, 0.0);
}

TEST(SdKMeans, TwoAssetsTwoClusters) {
  const auto panel = oracle::make_panel({oracle::normal_sample(4, 50, 0, 1), oracle::normal_sample(5, 50, 0, 1)});
  const auto c = sd_kmeans(panel, config(50, 1), kmeans(2, 1));
  EXPECT_NE(c.labels[0], c.labels[1]);
}

TEST(SdKMeans, RejectsBadK) {
  const auto panel = paired_panel();
  EXPECT_THROW(sd_kmeans(panel, config(50, 1), kmeans(5, 1)), ConfigError);
  EXPECT_THROW(sd_kmeans(panel, config(50, 1), kmeans(1, 1)), ConfigError);
  auto o = kmeans(2, 1);
  o.max_iter = 0;
  EXPECT_THROW(sd_kmeans(panel, config(50, 1), o), ConfigError);
}

TEST(SdKMeans, DeterministicAndCentersConsistent) {
  std::vector<std::vector<double>> cols;
  for (std::size_t i = 0; i < 6; ++i) cols.push_back(oracle::normal_sample(70 + i, 60, (i % 3) * 0.5, 1));
  const auto panel = oracle::make_panel(cols);
  auto o = kmeans(3, 17);
  o.max_iter = 5;
  const auto a = sd_kmeans(panel, config(80, 2), o);
  o.workers = 3;
  const auto b = sd_kmeans(panel, config(80, 2), o);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.member_distance, b.member_distance);
  EXPECT_LE(a.iterations_used, 5u);
  for (std::size_t t = 0; t < a.k; ++t) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < 6; ++i)
      if (a.labels[i] == t) members.push_back(i);
    const auto mean = mean_series(panel, members);
    for (std::size_t p = 0; p < mean.size(); ++p) EXPECT_NEAR(a.centers[t][p], mean[p], 1e-12);
  }
}

TEST(SdKMeans, RestartsNeverWorsenTheObjective) {
  std::vector<std::vector<double>> cols;
  for (std::size_t i = 0; i < 9; ++i) {
    auto c = oracle::normal_sample(60 + i, 80, 0.0, 1.0);
    cols.push_back(oracle::shifted(c, 5.0 * static_cast<double>(i / 3)));
  }
  const auto panel = oracle::make_panel(cols);
  auto total = [](const Clustering& c) {
    double s = 0.0;
    for (double d : c.member_distance) s += d;
    return s;
  };
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto one = kmeans(3, seed);
    one.restarts = 1;
    auto many = kmeans(3, seed);
    many.restarts = 6;
    EXPECT_LE(total(sd_kmeans(panel, config(100, seed), many)), total(sd_kmeans(panel, config(100, seed), one)));
  }
  auto none = kmeans(3, 0);
  none.restarts = 0;
  EXPECT_THROW(sd_kmeans(panel, config(100, 0), none), ConfigError);
}

TEST(KMeansDistance, SelfAndShift) {
  const auto s = oracle::uniform_sample(6, 200);
  EXPECT_EQ(kmeans_distance(s, s, config(100, 1)), 0.0);
  EXPECT_GE(kmeans_distance(s, oracle::shifted(s, 5.0), config(300, 1)), 0.95);
}

TEST(AverageLinkage, Examples) {
  Matrix d(3, 3, 0.0);
  d(0, 1) = d(1, 0) = 0.2;
  d(0, 2) = d(2, 0) = 0.4;
  d(1, 2) = d(2, 1) = 0.9;
  const std::vector<std::size_t> x{0}, y{1}, yz{1, 2};
  EXPECT_DOUBLE_EQ(average_linkage(d, x, yz), 0.3);
  EXPECT_DOUBLE_EQ(average_linkage(d, x, y), 0.2);
}

TEST(SdHierarchical, RecoversBlocks) {
  const auto m = block_matrix({0, 1, 0, 1}, 0.1, 0.9);
  const auto r = sd_hierarchical(m, 2);
  EXPECT_EQ(partition_of(r.clustering), (std::set<std::set<std::string>>{{"T10", "T12"}, {"T11", "T13"}}));
  ASSERT_EQ(r.dendrogram.merges.size(), 3u);
  EXPECT_DOUBLE_EQ(r.dendrogram.merges[2].height, 0.9);
}

TEST(SdHierarchical, ExtremeK) {
  const auto m = random_matrix(5, 1);
  const auto all = sd_hierarchical(m, 5);
  EXPECT_EQ(partition_of(all.clustering).size(), 5u);
  EXPECT_EQ(all.clustering.iterations_used, 0u);
  const auto one = sd_hierarchical(m, 1);
  EXPECT_EQ(partition_of(one.clustering).size(), 1u);
  EXPECT_THROW(sd_hierarchical(m, 0), ConfigError);
  EXPECT_THROW(sd_hierarchical(m, 6), ConfigError);
}

TEST(SdHierarchical, LabelsFollowSmallestTicker) {
  const auto m = block_matrix({1, 0, 1, 0, 2}, 0.1, 0.8);
  const auto r = sd_hierarchical(m, 3);
  EXPECT_EQ(r.clustering.labels, (std::vector<std::size_t>{0, 1, 0, 1, 2}));
}

TEST(SdHierarchical, TiesUseSmallestTickerPair) {
  const auto m = block_matrix({0, 1, 2, 3}, 0.0, 0.5);
  const auto d = build_dendrogram(m);
  EXPECT_EQ(d.merges[0].a, 0u);
  EXPECT_EQ(d.merges[0].b, 1u);
  EXPECT_EQ(d.merges[1].a, 2u);
  EXPECT_EQ(d.merges[1].b, 4u);
}

TEST(SdHierarchical, HeightsNondecreasingAndSizesConsistent) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto m = random_matrix(9, seed);
    const auto d = build_dendrogram(m);
    ASSERT_EQ(d.merges.size(), 8u);
    std::vector<std::size_t> size(9 + 8, 1);
    for (std::size_t s = 0; s < d.merges.size(); ++s) {
      if (s > 0) EXPECT_GE(d.merges[s].height, d.merges[s - 1].height - 1e-12);
      EXPECT_EQ(d.merges[s].size, size[d.merges[s].a] + size[d.merges[s].b]);
      size[9 + s] = d.merges[s].size;
    }
    EXPECT_EQ(d.merges.back().size, 9u);
  }
}

TEST(SdHierarchical, HeightsMatchDirectLinkage) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = random_matrix(8, 100 + seed);
    const auto d = build_dendrogram(m);
    std::vector<std::vector<std::size_t>> members(8 + 7);
    for (std::size_t i = 0; i < 8; ++i) members[i] = {i};
    for (std::size_t s = 0; s < d.merges.size(); ++s) {
      const auto& mg = d.merges[s];
      EXPECT_NEAR(mg.height, average_linkage(m.values, members[mg.a], members[mg.b]), 1e-12);
      members[8 + s] = members[mg.a];
      members[8 + s].insert(members[8 + s].end(), members[mg.b].begin(), members[mg.b].end());
    }
  }
}

TEST(SdHierarchical, CutsAreNestedAndMatchResult) {
  const auto m = random_matrix(10, 7);
  const auto d = build_dendrogram(m);
  for (std::size_t k = 1; k <= 10; ++k) {
    EXPECT_EQ(partition_of(sd_hierarchical(m, k).clustering).size(), k);
    const auto fine = d.cut(k, m.tickers);
    EXPECT_EQ(fine, sd_hierarchical(m, k).clustering.labels);
    if (k == 1) continue;
    const auto coarse = d.cut(k - 1, m.tickers);
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 10; ++j)
        if (fine[i] == fine[j]) EXPECT_EQ(coarse[i], coarse[j]);
  }
}

TEST(SdHierarchical, PermutationInvariantPartition) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = random_matrix(7, 300 + seed);
    const auto p = m.permuted({6, 2, 4, 0, 1, 5, 3});
    for (std::size_t k = 2; k <= 5; ++k) {
      EXPECT_EQ(partition_of(sd_hierarchical(m, k).clustering), partition_of(sd_hierarchical(p, k).clustering));
    }
  }
}

TEST(SdHierarchical, DendrogramJson) {
  const auto m = block_matrix({0, 0, 1}, 0.2, 0.7);
  const auto json = dendrogram_to_json(build_dendrogram(m), m.tickers);
  EXPECT_NE(json.find("\"merges\""), std::string::npos);
  EXPECT_NE(json.find("T12"), std::string::npos);
}
