// Copyright 2026 The bidlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "bidlab/core.hpp"
#include "bidlab/harness.hpp"
#include "bidlab/random.hpp"

namespace bidlab {
namespace {

TEST(MakeMarket, SortsByDecreasingRatio) {
  const std::vector<std::pair<double, double>> pairs{{0.2, 0.4}, {0.6, 0.2}};
  const auto m = make_market(pairs, std::vector<double>{0.5, 0.5});
  ASSERT_EQ(m.size(), 2u);
  EXPECT_DOUBLE_EQ(m.ratio(0), 3.0);
  EXPECT_DOUBLE_EQ(m.ratio(1), 0.5);
}

TEST(MakeMarket, Singleton) {
  const auto m = make_market(std::vector<std::pair<double, double>>{{1.0, 1.0}},
                             std::vector<double>{1.0});
  EXPECT_EQ(m.size(), 1u);
  EXPECT_DOUBLE_EQ(m.ratio(0), 1.0);
}

TEST(MakeMarket, GridSupportHasNineteenRatios) {
  const auto pairs = grid_support();
  EXPECT_EQ(pairs.size(), 19u);
  const std::vector<double> p(pairs.size(), 1.0 / 19.0);
  EXPECT_NO_THROW(make_market(pairs, p));
}

TEST(MakeMarket, RejectsBadInput) {
  using P = std::vector<std::pair<double, double>>;
  EXPECT_THROW(make_market(P{{1, 1}, {2, 2}}, std::vector<double>{0.5, 0.5}), InvalidInput);
  EXPECT_THROW(make_market(P{{1, 1}}, std::vector<double>{0.7}), InvalidInput);
  EXPECT_THROW(make_market(P{{1, 0}}, std::vector<double>{1.0}), InvalidInput);
  EXPECT_THROW(make_market(P{{1, 1}, {1, 2}}, std::vector<double>{1.2, -0.2}), InvalidInput);
  EXPECT_THROW(make_market(P{}, std::vector<double>{}), InvalidInput);
}

TEST(ThresholdVector, Expand) {
  EXPECT_EQ(tv_expand(ThresholdVector(3, 0, 0.3)), (std::vector<double>{0.3, 0, 0}));
  EXPECT_EQ(tv_expand(ThresholdVector(3, 3, 0.0)), (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(tv_expand(ThresholdVector(3, 1, 0.5)), (std::vector<double>{1, 0.5, 0}));
}

TEST(ThresholdVector, RejectsInvalid) {
  EXPECT_THROW(ThresholdVector(3, 4, 0.0), InvalidInput);
  EXPECT_THROW(ThresholdVector(3, 1, 1.0), InvalidInput);
  EXPECT_THROW(ThresholdVector(3, 3, 0.5), InvalidInput);
  EXPECT_THROW(tv_min(ThresholdVector(2, 1, 0), ThresholdVector(3, 1, 0)), InvalidInput);
}

TEST(ThresholdVector, MinExamples) {
  // Elementwise min of (1,1,0.5) and (1,0.9,0) is (1,0.9,0).
  EXPECT_EQ(tv_min(ThresholdVector(3, 2, 0.5), ThresholdVector(3, 1, 0.9)),
            ThresholdVector(3, 1, 0.9));
  EXPECT_EQ(tv_min(ThresholdVector(3, 1, 0.5), ThresholdVector(3, 1, 0.9)),
            ThresholdVector(3, 1, 0.5));
  EXPECT_EQ(tv_min(ThresholdVector(3, 2, 0), ThresholdVector(3, 2, 0)), ThresholdVector(3, 2, 0));
  EXPECT_EQ(tv_min(ThresholdVector(3, 3, 0), ThresholdVector(3, 0, 0.2)),
            ThresholdVector(3, 0, 0.2));
}

ThresholdVector random_tv(std::size_t K, std::mt19937_64& g) {
  std::uniform_int_distribution<std::size_t> head(0, K);
  std::uniform_real_distribution<double> rem(0.0, 1.0);
  const std::size_t h = head(g);
  return ThresholdVector(K, h, h == K ? 0.0 : (g() % 4 == 0 ? 0.0 : rem(g)));
}

TEST(ThresholdVector, MinLatticeProperties) {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t K = 1 + g() % 6;
    const auto a = random_tv(K, g), b = random_tv(K, g), c = random_tv(K, g);
    EXPECT_EQ(tv_min(a, b), tv_min(b, a));
    EXPECT_EQ(tv_min(tv_min(a, b), c), tv_min(a, tv_min(b, c)));
    EXPECT_EQ(tv_min(a, a), a);
    EXPECT_TRUE(precedes(a, b) || precedes(b, a));
    const auto ea = tv_expand(a), eb = tv_expand(b), em = tv_expand(tv_min(a, b));
    for (std::size_t i = 0; i < K; ++i) {
      EXPECT_EQ(em[i], std::min(ea[i], eb[i]));
    }
  }
}

TEST(ThresholdVector, OrderingPreservesWeightedSums) {
  std::mt19937_64 g(12);
  std::uniform_real_distribution<double> w(0.0, 5.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t K = 1 + g() % 8;
    auto a = random_tv(K, g), b = random_tv(K, g);
    if (!precedes(a, b)) std::swap(a, b);
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      const double wi = w(g);
      sa += wi * a[i];
      sb += wi * b[i];
    }
    EXPECT_LE(sa, sb + 1e-12);
  }
}

TEST(RoiMargin, Arithmetic) {
  using P = std::vector<std::pair<double, double>>;
  const auto m1 = make_market(P{{1.0, 0.4}}, std::vector<double>{1.0});
  EXPECT_NEAR(roi_margin(m1, BuyerParams{0.0, 2.0, 1.0}, 1), 0.2, 1e-15);
  const auto m2 = make_market(P{{0.2, 1.0}}, std::vector<double>{1.0});
  EXPECT_NEAR(roi_margin(m2, BuyerParams{0.0, 1.2, 1.0}, 1), -1.0, 1e-15);
  const auto m3 = make_market(P{{0.6, 0.5}}, std::vector<double>{1.0});
  EXPECT_NEAR(roi_margin(m3, BuyerParams{0.0, 1.3, 0.2}, 1), -0.05, 1e-15);
  EXPECT_THROW(roi_margin(m3, BuyerParams{}, 0), InvalidInput);
  EXPECT_THROW(roi_margin(m3, BuyerParams{}, 2), InvalidInput);
}

TEST(Random, StreamsAreReproducibleAndDistinct) {
  RandomSource a(5, stream_id({1, 2})), b(5, stream_id({1, 2})), c(5, stream_id({1, 3}));
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs = differs || x != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(Random, DiscreteSamplerFrequencies) {
  const std::vector<double> p{0.1, 0.6, 0.3};
  DiscreteSampler s(p);
  RandomSource rng(3, 0);
  std::vector<double> counts(3, 0.0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) counts[s(rng)] += 1.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double se = std::sqrt(p[k] * (1 - p[k]) / n);
    EXPECT_NEAR(counts[k] / n, p[k], 5 * se);
  }
}

}  // namespace
}  // namespace bidlab
