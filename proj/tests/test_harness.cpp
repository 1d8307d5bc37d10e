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

#include <cmath>
#include <vector>

#include "bidlab/harness.hpp"

namespace bidlab {
namespace {

using Pairs = std::vector<std::pair<double, double>>;

TEST(Regime, DefaultParameterSets) {
  EXPECT_EQ(default_params(Regime::kRoiDominant).gamma, 2.1);
  EXPECT_EQ(default_params(Regime::kRoiDominant).rho, 0.4);
  EXPECT_EQ(default_params(Regime::kBudgetDominant).gamma, 1.2);
  EXPECT_EQ(default_params(Regime::kBudgetDominant).rho, 0.05);
  EXPECT_EQ(default_params(Regime::kAlphaDominant).gamma, 1.2);
  EXPECT_EQ(default_params(Regime::kAlphaDominant).rho, 0.4);
  for (auto r : {Regime::kRoiDominant, Regime::kBudgetDominant, Regime::kAlphaDominant}) {
    EXPECT_EQ(default_params(r).alpha, 1.0);
    EXPECT_EQ(parse_regime(to_string(r)), r);
  }
  EXPECT_THROW(parse_regime("nope"), InvalidInput);
}

TEST(Support, MergeSumsDuplicateRatios) {
  const Pairs pairs{{0.2, 0.2}, {0.4, 0.2}, {0.4, 0.4}, {0.8, 0.4}};
  const auto merged = merge_duplicate_ratios(pairs, std::vector<double>{0.1, 0.2, 0.3, 0.4});
  EXPECT_EQ(merged.pairs, (Pairs{{0.2, 0.2}, {0.4, 0.2}}));
  EXPECT_NEAR(merged.probs[0], 0.4, 1e-15);
  EXPECT_NEAR(merged.probs[1], 0.6, 1e-15);
}

TEST(RegimeSampler, InstancesShowTheirBindingPattern) {
  const auto support = grid_support();
  for (auto r : {Regime::kRoiDominant, Regime::kBudgetDominant, Regime::kAlphaDominant}) {
    const auto params = default_params(r);
    for (std::size_t i = 0; i < 10; ++i) {
      RandomSource rng(1, purpose_stream(r, i, StreamPurpose::kInstance));
      const auto m = sample_regime_instance(r, params, support, rng);
      EXPECT_EQ(m.size(), 19u);
      const auto sol = solve_expected(m, params);
      EXPECT_EQ(classify_regime(sol), r);
      const double tol = 1e-9 * sol.scale;
      switch (r) {
        case Regime::kRoiDominant:
          EXPECT_LE(std::abs(sol.roi_slack), tol);
          break;
        case Regime::kBudgetDominant:
          EXPECT_LE(std::abs(sol.budget_slack), tol);
          EXPECT_GT(sol.roi_slack, tol);
          break;
        case Regime::kAlphaDominant:
          EXPECT_GT(sol.roi_slack, tol);
          EXPECT_GT(sol.budget_slack, tol);
          break;
      }
    }
  }
}

TEST(RegimeSampler, RejectionCap) {
  // Every type clears the ROI target and the budget is huge: nothing binds.
  const Pairs support{{1.0, 0.2}, {0.8, 0.4}};
  RandomSource rng(1, 0);
  EXPECT_THROW(sample_regime_instance(Regime::kRoiDominant, BuyerParams{1.0, 1.5, 10.0}, support,
                                      rng, 1000),
               InvalidInput);
}

TEST(BidderSpec, NamesRoundTrip) {
  for (const char* n : {"ctbr_ee", "ctbr_sgd_vanishing", "ctbr_sgd_constant", "conserv",
                        "budget_pacing", "roi_pacing", "pacing", "known_threshold", "never_bid"}) {
    EXPECT_EQ(parse_bidder(n).name(), n);
  }
  EXPECT_THROW(parse_bidder("oracle"), InvalidInput);
  EXPECT_EQ(standard_roster().size(), 5u);
  EXPECT_TRUE(parse_bidder("pacing").stops_at_budget());
  EXPECT_FALSE(parse_bidder("ctbr_ee").stops_at_budget());
}

TEST(Trial, ConservWithoutProfitableTypesHasNoSpend) {
  const auto m = make_market(Pairs{{0.5, 0.5}, {0.2, 0.4}}, std::vector<double>{0.5, 0.5});
  const BuyerParams params{0.5, 1.5, 0.3};
  RandomSource rng(1, 0);
  const auto metrics = run_bidder_trial(m, params, parse_bidder("conserv"), 500, rng);
  EXPECT_FALSE(metrics.has_spend);
  EXPECT_TRUE(std::isnan(metrics.roi_ratio));
  EXPECT_TRUE(metrics.roi_satisfied);
  EXPECT_EQ(metrics.utility, 0.0);
}

TEST(Trial, Deterministic) {
  const auto params = default_params(Regime::kBudgetDominant);
  RandomSource inst(4, 0);
  const auto m = sample_regime_instance(Regime::kBudgetDominant, params, grid_support(), inst);
  for (const auto& spec : standard_roster()) {
    RandomSource a(9, 1), b(9, 1);
    const auto x = run_bidder_trial(m, params, spec, 3000, a);
    const auto y = run_bidder_trial(m, params, spec, 3000, b);
    EXPECT_EQ(x.utility, y.utility);
    EXPECT_EQ(x.regret, y.regret);
    EXPECT_EQ(x.record.bids, y.record.bids);
    EXPECT_EQ(x.depletion, y.depletion);
  }
}

TEST(Trial, CtbrNearOptimalInAlphaRegime) {
  const auto params = default_params(Regime::kAlphaDominant);
  RandomSource inst(5, 0);
  const auto m = sample_regime_instance(Regime::kAlphaDominant, params, grid_support(), inst);
  RandomSource rng(6, 0);
  const auto metrics = run_bidder_trial(m, params, parse_bidder("ctbr_ee"), 10000, rng);
  EXPECT_NEAR(metrics.normalized_utility, 1.0, 0.05);
}

TEST(Suite, ShapeCommonStreamsAndDepletion) {
  auto cfg = ScenarioConfig::for_regime(Regime::kBudgetDominant);
  cfg.instances = 3;
  cfg.horizon = 2000;
  const auto res = run_benchmark_suite(cfg);
  ASSERT_EQ(res.aggregate.size(), cfg.bidders.size());
  for (std::size_t b = 0; b < cfg.bidders.size(); ++b) {
    EXPECT_EQ(res.aggregate[b].bidder, cfg.bidders[b].name());
    EXPECT_EQ(res.aggregate[b].regime, Regime::kBudgetDominant);
  }
  for (const auto& inst : res.instances) {
    ASSERT_EQ(inst.runs.size(), cfg.bidders.size());
    for (std::size_t b = 0; b < inst.runs.size(); ++b) {
      const auto& m = inst.runs[b];
      EXPECT_EQ(m.record.types, inst.types);  // common random numbers
      for (std::size_t t = 1; t < m.depletion.size(); ++t) {
        ASSERT_GE(m.depletion[t], m.depletion[t - 1]);
      }
      if (cfg.bidders[b].stops_at_budget()) {
        EXPECT_LE(m.final_depletion(), 1.0 + 1e-12);
      }
      if (m.roi_satisfied && m.budget_satisfied) {
        EXPECT_GE(m.regret, -1e-9);
      }
    }
  }
}

TEST(Suite, Deterministic) {
  auto cfg = ScenarioConfig::for_regime(Regime::kRoiDominant);
  cfg.instances = 2;
  cfg.horizon = 1500;
  const auto a = run_benchmark_suite(cfg, false);
  const auto b = run_benchmark_suite(cfg, false);
  for (std::size_t i = 0; i < a.aggregate.size(); ++i) {
    EXPECT_EQ(a.aggregate[i].median_norm_utility, b.aggregate[i].median_norm_utility);
    EXPECT_EQ(a.aggregate[i].final_depletion, b.aggregate[i].final_depletion);
  }
}

TEST(Quantile, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile({1, NAN, 3}, 0.5), 2.0);
  EXPECT_TRUE(std::isnan(quantile({}, 0.5)));
}

TEST(Sweep, LogLogFitRecoversPowerLaw) {
  const std::vector<double> x{10, 100, 1000}, y{3 * std::pow(10, 0.7), 3 * std::pow(100, 0.7),
                                                 3 * std::pow(1000, 0.7)};
  const auto [slope, intercept] = loglog_fit(x, y);
  EXPECT_NEAR(slope, 0.7, 1e-12);
  EXPECT_NEAR(intercept, std::log(3.0), 1e-12);
}

TEST(Sweep, NeverBidRegretIsLinear) {
  const auto params = default_params(Regime::kRoiDominant);
  RandomSource inst(1, 0);
  const auto m = sample_regime_instance(Regime::kRoiDominant, params, grid_support(), inst);
  const std::vector<std::size_t> horizons{500, 2000, 8000};
  const auto res = regret_scaling_sweep(m, params, parse_bidder("never_bid"), horizons, 5, 3);
  EXPECT_NEAR(res.slope, 1.0, 0.05);
  EXPECT_FALSE(res.warnings.empty());  // fewer than 20 seeds
}

}  // namespace
}  // namespace bidlab
