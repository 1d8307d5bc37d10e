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

// Acceptance checks. One PASS/FAIL line per criterion; criteria listed in
// kKnownRed are reported but do not fail the process.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bidlab/bidlab.hpp"
#include "random_instances.hpp"

namespace {

using namespace bidlab;
using Clock = std::chrono::steady_clock;

const std::set<int> kKnownRed = {5, 7};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

// 1 ------------------------------------------------------------------------
Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 g(1);
  double worst = 0.0;
  int bad = 0;
  for (int i = 0; i < 200; ++i) {
    const auto inst = testing::random_lp_instance(g, 2, 8);
    const double u = solve_threshold(inst.weights, inst.alpha, inst.gamma, inst.cap, inst.market)
                         .objective;
    const double ref =
        lp_vertex_oracle(inst.weights, inst.alpha, inst.gamma, inst.cap, inst.market).objective;
    const double rel = std::abs(u - ref) / (1.0 + std::abs(u));
    worst = std::max(worst, rel);
    bad += rel > 1e-7;
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && secs < 10.0,
          "200 instances, max |dU|/(1+|U|) = " + fmt("%.3g", worst) + ", " + fmt("%.2f s", secs)};
}

// 2 ------------------------------------------------------------------------
Outcome known_distribution_bidding() {
  std::mt19937_64 g(2);
  const std::size_t T = 200000;
  int failures = 0;
  double worst_z = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto inst = testing::random_lp_instance(g, 2, 8);
    const BuyerParams params{inst.alpha, inst.gamma, inst.cap};
    const auto sol = solve_expected(inst.market, params);
    FixedThresholdBidder bidder(inst.market, sol.solution);
    RandomSource rng(2, stream_id({2, static_cast<std::uint64_t>(i)}));
    const auto types = draw_arrivals(inst.market, T, rng);
    double su = 0, su2 = 0, sb = 0, sb2 = 0, ss = 0, ss2 = 0;
    for (std::size_t k : types) {
      const double v = inst.market.value(k), d = inst.market.cost(k);
      const bool win = bidder.bid(v, rng).beats(d);
      const double u = win ? v - params.alpha * d : 0.0;
      const double b = win ? v - params.gamma * d : 0.0;
      const double s = win ? d : 0.0;
      su += u, su2 += u * u, sb += b, sb2 += b * b, ss += s, ss2 += s * s;
    }
    const double n = static_cast<double>(T);
    auto se = [&](double s1, double s2) {
      return std::sqrt(std::max(s2 / n - (s1 / n) * (s1 / n), 0.0) / n);
    };
    const double se_u = se(su, su2), se_b = se(sb, sb2), se_s = se(ss, ss2);
    const double z_u = std::abs(su / n - sol.objective) / std::max(se_u, 1e-300);
    worst_z = std::max(worst_z, z_u);
    const bool ok = std::abs(su / n - sol.objective) <= 4 * se_u + 1e-12 &&
                    sb / n >= -4 * se_b - 1e-12 && ss / n <= params.rho + 4 * se_s + 1e-12;
    failures += !ok;
  }
  return {failures == 0, "20 instances, T = 200000, failures = " + std::to_string(failures) +
                             ", max utility z = " + fmt("%.2f", worst_z)};
}

// 3 ------------------------------------------------------------------------
Outcome pacing_loses_roi() {
  RandomSource rng(3, 0);
  const auto mc = simulate_example1(0.4, 1.0, 1.0, 100000, rng);
  const double analytic = example1_expected_roi(0.4, 1.0, 1.0, 1.0);
  return {std::abs(mc.mean - analytic) <= 0.01 && std::abs(mc.mean + 0.1) <= 0.01,
          "mean per-period ROI balance " + fmt("%.5f", mc.mean) + " (analytic " +
              fmt("%.3f", analytic) + ")"};
}

// 4 ------------------------------------------------------------------------
Outcome revenue_curve_structure() {
  const auto t0 = Clock::now();
  const auto low = bell_shape_check(demo_pricing_model(1.3));
  const auto high = bell_shape_check(demo_pricing_model(1.7));
  bool nonbinding_ok = true;
  for (const auto* rep : {&low, &high}) {
    for (const auto& p : rep->curve) {
      if (p.cls == PriceClass::kNonBinding && std::abs(p.revenue - p.price) > 1e-12) {
        nonbinding_ok = false;
      }
    }
  }
  const double secs = seconds_since(t0);
  const bool plateau_ok = !low.plateau_empty() && std::abs(low.plateau_revenue() - 0.2) <= 1e-12;
  bool plateau_all = true;
  for (std::size_t m : low.plateau) {
    plateau_all = plateau_all && std::abs(low.curve[m - 1].revenue - 0.2) <= 1e-12;
  }
  return {low.pass && high.pass && plateau_ok && plateau_all && high.plateau_empty() &&
              nonbinding_ok && secs < 1.0,
          "gamma 1.3: " + std::string(low.pass ? "pass" : "FAIL") + ", plateau " +
              std::to_string(low.plateau.size()) + " prices at " +
              fmt("%.12g", low.plateau_revenue()) + "; gamma 1.7: " +
              std::string(high.pass ? "pass" : "FAIL") +
              (high.plateau_empty() ? ", plateau empty" : ", plateau NOT empty") + "; " +
              fmt("%.3f s", secs)};
}

// 5 ------------------------------------------------------------------------
std::vector<AggregateRow> g_suite_rows;

Outcome benchmark_comparison() {
  const auto t0 = Clock::now();
  bool beats_all = true;
  bool roi_ok = true;
  std::string detail;
  g_suite_rows.clear();
  for (Regime r : {Regime::kRoiDominant, Regime::kBudgetDominant, Regime::kAlphaDominant}) {
    auto cfg = ScenarioConfig::for_regime(r);
    const auto res = run_benchmark_suite(cfg, false);
    const AggregateRow& ctbr = res.aggregate.front();
    detail += std::string(" [") + to_string(r) + "] ctbr " + fmt("%.6f", ctbr.median_norm_utility);
    for (std::size_t b = 1; b < res.aggregate.size(); ++b) {
      const auto& row = res.aggregate[b];
      const bool ok = ctbr.median_norm_utility > row.median_norm_utility;
      beats_all = beats_all && ok;
      detail += ", " + row.bidder + " " + fmt("%.6f", row.median_norm_utility) +
                (ok ? "" : " (not beaten)");
    }
    if (r != Regime::kRoiDominant) {
      roi_ok = roi_ok && ctbr.roi_attained_frac >= 0.8;
      detail += ", roi attained " + fmt("%.2f", ctbr.roi_attained_frac);
    }
    g_suite_rows.insert(g_suite_rows.end(), res.aggregate.begin(), res.aggregate.end());
  }
  const double secs = seconds_since(t0);
  return {beats_all && roi_ok && secs < 300.0, fmt("%.1f s;", secs) + detail};
}

// 6 ------------------------------------------------------------------------
Outcome pricing_with_clairvoyant_buyer() {
  const auto model = demo_pricing_model(1.3);
  const double best = max_revenue(model);
  int hits = 0;
  std::size_t max_episodes = 0;
  for (int s = 0; s < 100; ++s) {
    ClairvoyantBuyer buyer(model, RandomSource(6, stream_id({6, static_cast<std::uint64_t>(s)})));
    const auto run = binary_search_pricing(model, buyer, 2000, 20000);
    const double pi = revenue_pi(model, model.prices()[run.best_index - 1]);
    hits += std::abs(pi - best) <= 1e-9;
    max_episodes = std::max(max_episodes, run.episodes.size());
  }
  return {hits >= 95 && max_episodes <= 10,
          std::to_string(hits) + "/100 runs exploit a revenue-maximizing price, at most " +
              std::to_string(max_episodes) + " exploration episodes"};
}

// 7 ------------------------------------------------------------------------
SweepResult g_sweep;

Outcome regret_scaling() {
  const Regime r = Regime::kRoiDominant;
  const auto params = default_params(r);
  RandomSource inst_rng(1, purpose_stream(r, 0, StreamPurpose::kInstance));
  const auto market = sample_regime_instance(r, params, grid_support(), inst_rng);
  const std::vector<std::size_t> horizons{2500, 10000, 40000};
  g_sweep = regret_scaling_sweep(market, params, parse_bidder("ctbr_ee"), horizons, 20, 1);
  const auto never = regret_scaling_sweep(market, params, parse_bidder("never_bid"), horizons, 20, 1);
  std::string pts;
  for (const auto& p : g_sweep.points) {
    pts += " T=" + std::to_string(p.horizon) + ":" + fmt("%.3f", p.mean_regret) + "+-" +
           fmt("%.3f", p.std_error);
  }
  const bool ok = g_sweep.slope >= 0.3 && g_sweep.slope <= 0.8 && std::abs(never.slope - 1.0) <= 0.05;
  return {ok, "ctbr slope " + fmt("%.3f", g_sweep.slope) + " (" + pts + " ), never-bid slope " +
                  fmt("%.3f", never.slope)};
}

// 8 ------------------------------------------------------------------------
Outcome two_sided() {
  const auto model = demo_pricing_model(1.3);
  const std::size_t T = 50000;
  const std::size_t E = default_episode_length(T);
  const double best = max_revenue(model);
  double sum = 0.0;
  for (int s = 0; s < 20; ++s) {
    CtbrPostedPriceBuyer buyer(model, LearnerConfig::sgd_constant(T), 1.0,
                               RandomSource(8, stream_id({8, static_cast<std::uint64_t>(s)})));
    const auto run = binary_search_pricing(model, buyer, E, T);
    sum += run.exploit_mean_revenue();
  }
  const double mean = sum / 20.0;
  const double rel = std::abs(mean - best) / best;
  return {rel <= 0.15, "E = " + std::to_string(E) + ", exploitation revenue " + fmt("%.4f", mean) +
                           " vs max " + fmt("%.4f", best) + " (" + fmt("%.1f%%", 100 * rel) + ")"};
}

// 9 ------------------------------------------------------------------------
std::string render_outputs() {
  std::ostringstream out;
  {
    auto cfg = ScenarioConfig::for_regime(Regime::kBudgetDominant);
    cfg.instances = 2;
    cfg.horizon = 3000;
    const auto res = run_benchmark_suite(cfg);
    write_aggregate_csv(out, res.aggregate);
    for (const auto& inst : res.instances) {
      for (const auto& m : inst.runs) write_run_csv(out, inst.market, cfg.params, m.record);
    }
  }
  {
    const auto model = demo_pricing_model(1.3);
    write_revenue_csv(out, revenue_curve(model));
    ClairvoyantBuyer b(model, RandomSource(9, 1));
    write_pricing_csv(out, binary_search_pricing(model, b, 2000, 20000));
    CtbrPostedPriceBuyer c(model, LearnerConfig::sgd_constant(50000), 1.0, RandomSource(9, 2));
    write_pricing_csv(out, binary_search_pricing(model, c, default_episode_length(50000), 50000));
  }
  {
    const auto params = default_params(Regime::kRoiDominant);
    RandomSource inst(9, 3);
    const auto m = sample_regime_instance(Regime::kRoiDominant, params, grid_support(), inst);
    const std::vector<std::size_t> hs{500, 1000, 2000};
    write_sweep_csv(out, regret_scaling_sweep(m, params, parse_bidder("ctbr_ee"), hs, 5, 9));
  }
  return out.str();
}

Outcome determinism() {
  const std::string a = render_outputs();
  const std::string b = render_outputs();
  std::ostringstream s1, s2;
  write_aggregate_csv(s1, g_suite_rows);
  const auto rerun = benchmark_comparison();
  write_aggregate_csv(s2, g_suite_rows);
  const bool ok = a == b && s1.str() == s2.str() && !a.empty();
  return {ok, std::to_string(a.size() + s1.str().size()) + " CSV bytes compared across reruns"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", oracle_equivalence},
      {"known-distribution threshold bidding", known_distribution_bidding},
      {"pacing with the optimal ROI multiplier", pacing_loses_roi},
      {"revenue curve structure", revenue_curve_structure},
      {"benchmark comparison", benchmark_comparison},
      {"binary-search pricing, clairvoyant buyer", pricing_with_clairvoyant_buyer},
      {"regret scaling", regret_scaling},
      {"two-sided pricing", two_sided},
      {"determinism", determinism},
  };
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool known = kKnownRed.count(id) > 0;
    const char* status = o.pass ? "PASS" : known ? "FAIL (known, see decisions ledger)" : "FAIL";
    std::printf("criterion %d %s: %s -- %s\n", id, criteria[i].first, status, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !known) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
