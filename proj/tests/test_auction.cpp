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

#include <vector>

#include "bidlab/auction.hpp"
#include "bidlab/benchmarks.hpp"

namespace bidlab {
namespace {

using Pairs = std::vector<std::pair<double, double>>;

TEST(Bid, TiesWinAndSentinelBeatsEverything) {
  EXPECT_TRUE(Bid(0.5).beats(0.5));
  EXPECT_TRUE(Bid(0.5 * (1 - 1e-12)).beats(0.5));
  EXPECT_FALSE(Bid(0.49).beats(0.5));
  EXPECT_TRUE(Bid::always_win().beats(1e300));
  EXPECT_TRUE(Bid::always_win().is_always_win());
  EXPECT_FALSE(Bid(0.0).beats(1e-9));
}

TEST(Simulate, AccountsUtilitySpendAndBalance) {
  const auto m = make_market(Pairs{{1.0, 0.5}, {0.4, 0.8}}, std::vector<double>{0.5, 0.5});
  const BuyerParams params{0.5, 1.5, 0.3};
  struct AlwaysBid {
    Bid bid(double, RandomSource&) { return Bid::always_win(); }
    void observe(const Observation&) {}
  } b;
  RandomSource rng(1, 0);
  const std::vector<std::size_t> types{0, 1, 0};
  const auto rec = simulate(b, m, params, types, rng);
  EXPECT_NEAR(rec.spend, 1.8, 1e-12);
  EXPECT_NEAR(rec.value, 2.4, 1e-12);
  EXPECT_NEAR(rec.utility, 2.4 - 0.5 * 1.8, 1e-12);
  EXPECT_NEAR(rec.roi_balance, 2.4 - 1.5 * 1.8, 1e-12);
  EXPECT_NEAR(rec.budget, 0.9, 1e-12);
  EXPECT_FALSE(rec.budget_satisfied());
  EXPECT_FALSE(rec.roi_satisfied());
}

TEST(Simulate, HardBudgetStopRefusesOverspend) {
  const auto m = make_market(Pairs{{1.0, 0.5}}, std::vector<double>{1.0});
  const BuyerParams params{0.0, 1.0, 0.2};
  ConservBidder b{1.0};
  RandomSource rng(1, 0);
  const std::vector<std::size_t> types(10, 0);
  const auto rec = simulate(b, m, params, types, rng, SimOptions{true});
  EXPECT_LE(rec.spend, rec.budget + 1e-12);
  EXPECT_NEAR(rec.spend, 2.0, 1e-12);
  EXPECT_TRUE(rec.budget_satisfied());
}

TEST(Simulate, NeverBidderNeverWins) {
  const auto m = make_market(Pairs{{1.0, 0.5}}, std::vector<double>{1.0});
  NeverBidder b;
  RandomSource rng(1, 0);
  const std::vector<std::size_t> types(10, 0);
  const auto rec = simulate(b, m, BuyerParams{0.0, 1.0, 1.0}, types, rng);
  EXPECT_EQ(rec.spend, 0.0);
  EXPECT_TRUE(rec.roi_satisfied());
}

}  // namespace
}  // namespace bidlab
