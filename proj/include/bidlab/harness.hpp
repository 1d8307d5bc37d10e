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

// Experiment harness: regime instances on the 5x5 grid support, single
// bidder trials on shared arrival streams, suite aggregation and regret
// scaling fits.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bidlab/auction.hpp"
#include "bidlab/benchmarks.hpp"
#include "bidlab/core.hpp"
#include "bidlab/ctbr.hpp"
#include "bidlab/hindsight.hpp"
#include "bidlab/random.hpp"

namespace bidlab {

// ---------------------------------------------------------------------------
// Regimes

enum class Regime : std::uint8_t { kRoiDominant = 0, kBudgetDominant = 1, kAlphaDominant = 2 };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::kRoiDominant:
      return "roi";
    case Regime::kBudgetDominant:
      return "budget";
    case Regime::kAlphaDominant:
      return "alpha";
  }
  return "?";
}

inline Regime parse_regime(const std::string& s) {
  if (s == "roi") return Regime::kRoiDominant;
  if (s == "budget") return Regime::kBudgetDominant;
  if (s == "alpha") return Regime::kAlphaDominant;
  throw InvalidInput("unknown regime '" + s + "' (expected roi, budget or alpha)");
}

/// alpha = 1 with (gamma, rho) = (2.1, 0.4), (1.2, 0.05) or (1.2, 0.4).
inline BuyerParams default_params(Regime r) {
  switch (r) {
    case Regime::kRoiDominant:
      return {1.0, 2.1, 0.4};
    case Regime::kBudgetDominant:
      return {1.0, 1.2, 0.05};
    case Regime::kAlphaDominant:
      return {1.0, 1.2, 0.4};
  }
  return {};
}

/// Which constraints bind at the expected-value optimum, or nullopt when
/// both do.
inline std::optional<Regime> classify_regime(const HindsightSolution& sol) {
  const bool roi = sol.roi_binding();
  const bool budget = sol.budget_binding();
  if (roi && budget) return std::nullopt;
  if (roi) return Regime::kRoiDominant;
  if (budget) return Regime::kBudgetDominant;
  return Regime::kAlphaDominant;
}

// ---------------------------------------------------------------------------
// Supports

struct MergedSupport {
  std::vector<std::pair<double, double>> pairs;
  std::vector<double> probs;
};

/// Collapses pairs whose ratios agree to relative 1e-9. Each class keeps its
/// first pair in input order and the summed probability.
inline MergedSupport merge_duplicate_ratios(std::span<const std::pair<double, double>> pairs,
                                            std::span<const double> probs) {
  if (pairs.size() != probs.size()) throw InvalidInput("pairs and probs differ in length");
  MergedSupport out;
  std::vector<double> ratios;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double r = pairs[i].first / pairs[i].second;
    std::size_t j = 0;
    while (j < ratios.size() && std::abs(ratios[j] - r) > kInputTol * std::max(ratios[j], r)) ++j;
    if (j == ratios.size()) {
      ratios.push_back(r);
      out.pairs.push_back(pairs[i]);
      out.probs.push_back(probs[i]);
    } else {
      out.probs[j] += probs[i];
    }
  }
  return out;
}

/// The 19 distinct ratios of {0.2, 0.4, 0.6, 0.8, 1}^2, one grid pair each.
inline std::vector<std::pair<double, double>> grid_support() {
  std::vector<std::pair<double, double>> pairs;
  for (int a = 1; a <= 5; ++a) {
    for (int b = 1; b <= 5; ++b) pairs.emplace_back(a / 5.0, b / 5.0);
  }
  const std::vector<double> uniform(pairs.size(), 1.0 / static_cast<double>(pairs.size()));
  return merge_duplicate_ratios(pairs, uniform).pairs;
}

inline constexpr std::size_t kRegimeRejectionCap = 100000;

/// Draws p with i.i.d. Uniform(0,1) entries rescaled to sum one, retrying
/// until the expected-value optimum shows the requested binding pattern.
inline MarketModel sample_regime_instance(Regime regime, const BuyerParams& params,
                                          std::span<const std::pair<double, double>> support,
                                          RandomSource& rng,
                                          std::size_t max_attempts = kRegimeRejectionCap) {
  params.validate();
  const std::vector<double> uniform(support.size(), 1.0 / static_cast<double>(support.size()));
  const MarketModel base = make_market(support, uniform);
  std::vector<double> p(base.size());
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    double sum = 0.0;
    for (double& x : p) {
      x = rng.uniform();
      sum += x;
    }
    if (!(sum > 0.0)) continue;
    for (double& x : p) x /= sum;
    MarketModel candidate = base.with_probs(p);
    if (classify_regime(solve_expected(candidate, params)) == regime) return candidate;
  }
  throw InvalidInput(std::string("no ") + to_string(regime) + "-dominant instance found within " +
                     std::to_string(max_attempts) + " draws");
}

// ---------------------------------------------------------------------------
// Bidder specifications

enum class BidderKind : std::uint8_t {
  kCtbrEE,
  kCtbrSgdVanishing,
  kCtbrSgdConstant,
  kConserv,
  kBudgetPacing,
  kRoiPacing,
  kPacing,
  kKnownThreshold,
  kNeverBid,
};

enum class ScheduleChoice : std::uint8_t { kPower, kTheory, kConstant };

struct BidderSpec {
  BidderSpec() = default;
  explicit BidderSpec(BidderKind k, ScheduleChoice s = ScheduleChoice::kPower,
                      double exponent = 1.0)
      : kind(k), schedule(s), power_exponent(exponent) {}

  BidderKind kind = BidderKind::kCtbrEE;
  ScheduleChoice schedule = ScheduleChoice::kPower;
  double power_exponent = 1.0;
  double constant_ell = 0.0;
  std::optional<bool> hard_budget_stop;  // defaults: on for benchmarks, off otherwise

  bool is_ctbr() const {
    return kind == BidderKind::kCtbrEE || kind == BidderKind::kCtbrSgdVanishing ||
           kind == BidderKind::kCtbrSgdConstant;
  }
  bool is_benchmark() const {
    return kind == BidderKind::kConserv || kind == BidderKind::kBudgetPacing ||
           kind == BidderKind::kRoiPacing || kind == BidderKind::kPacing;
  }
  bool stops_at_budget() const { return hard_budget_stop.value_or(is_benchmark()); }

  std::string name() const {
    switch (kind) {
      case BidderKind::kCtbrEE:
        return "ctbr_ee";
      case BidderKind::kCtbrSgdVanishing:
        return "ctbr_sgd_vanishing";
      case BidderKind::kCtbrSgdConstant:
        return "ctbr_sgd_constant";
      case BidderKind::kConserv:
        return "conserv";
      case BidderKind::kBudgetPacing:
        return "budget_pacing";
      case BidderKind::kRoiPacing:
        return "roi_pacing";
      case BidderKind::kPacing:
        return "pacing";
      case BidderKind::kKnownThreshold:
        return "known_threshold";
      case BidderKind::kNeverBid:
        return "never_bid";
    }
    return "?";
  }
};

inline BidderSpec parse_bidder(const std::string& s) {
  static const std::pair<const char*, BidderKind> kNames[] = {
      {"ctbr_ee", BidderKind::kCtbrEE},
      {"ctbr_sgd_vanishing", BidderKind::kCtbrSgdVanishing},
      {"ctbr_sgd_constant", BidderKind::kCtbrSgdConstant},
      {"conserv", BidderKind::kConserv},
      {"budget_pacing", BidderKind::kBudgetPacing},
      {"roi_pacing", BidderKind::kRoiPacing},
      {"pacing", BidderKind::kPacing},
      {"known_threshold", BidderKind::kKnownThreshold},
      {"never_bid", BidderKind::kNeverBid},
  };
  for (const auto& [name, kind] : kNames) {
    if (s == name) return BidderSpec{kind};
  }
  throw InvalidInput("unknown bidder '" + s + "'");
}

/// CTBR_EE with the s = 1 power schedule plus the four benchmarks.
inline std::vector<BidderSpec> standard_roster() {
  return {BidderSpec{BidderKind::kCtbrEE}, BidderSpec{BidderKind::kConserv},
          BidderSpec{BidderKind::kBudgetPacing}, BidderSpec{BidderKind::kRoiPacing},
          BidderSpec{BidderKind::kPacing}};
}

inline ConfidenceSchedule make_schedule(const BidderSpec& spec, const MarketModel& market,
                                        const BuyerParams& params, const LearnerConfig& learner,
                                        std::size_t horizon) {
  switch (spec.schedule) {
    case ScheduleChoice::kPower:
      return ConfidenceSchedule::power(spec.power_exponent, market, params.gamma);
    case ScheduleChoice::kConstant:
      return ConfidenceSchedule::fixed(spec.constant_ell);
    case ScheduleChoice::kTheory:
      switch (learner.kind) {
        case LearnerKind::kEmpiricalEstimate:
          return ConfidenceSchedule::ee_theory(market.size(), horizon);
        case LearnerKind::kSgdVanishing:
          return ConfidenceSchedule::sgd_vanishing_theory(horizon);
        case LearnerKind::kSgdConstant:
          return ConfidenceSchedule::sgd_constant_theory(horizon, learner.eta);
      }
  }
  throw InvalidInput("unsupported schedule choice");
}

/// Runs one bidder over a fixed arrival stream.
inline RunRecord run_spec(const BidderSpec& spec, const MarketModel& market,
                          const BuyerParams& params, std::span<const std::size_t> types,
                          RandomSource& rng) {
  const std::size_t T = types.size();
  const SimOptions options{spec.stops_at_budget()};
  switch (spec.kind) {
    case BidderKind::kCtbrEE:
    case BidderKind::kCtbrSgdVanishing:
    case BidderKind::kCtbrSgdConstant: {
      const LearnerConfig learner = spec.kind == BidderKind::kCtbrEE
                                        ? LearnerConfig::empirical()
                                    : spec.kind == BidderKind::kCtbrSgdVanishing
                                        ? LearnerConfig::sgd_vanishing()
                                        : LearnerConfig::sgd_constant(T);
      CtbrBidder b(market, params, learner, make_schedule(spec, market, params, learner, T));
      return simulate(b, market, params, types, rng, options);
    }
    case BidderKind::kConserv: {
      ConservBidder b{params.gamma};
      return simulate(b, market, params, types, rng, options);
    }
    case BidderKind::kBudgetPacing:
    case BidderKind::kRoiPacing:
    case BidderKind::kPacing: {
      const PacingKind kind = spec.kind == BidderKind::kBudgetPacing ? PacingKind::kBudget
                              : spec.kind == BidderKind::kRoiPacing  ? PacingKind::kRoi
                                                                     : PacingKind::kJoint;
      PacingBidder b(kind, params, PacingState::for_horizon(T));
      return simulate(b, market, params, types, rng, options);
    }
    case BidderKind::kKnownThreshold: {
      FixedThresholdBidder b(market, solve_expected(market, params).solution);
      return simulate(b, market, params, types, rng, options);
    }
    case BidderKind::kNeverBid: {
      NeverBidder b;
      return simulate(b, market, params, types, rng, options);
    }
  }
  throw InvalidInput("unsupported bidder");
}

// ---------------------------------------------------------------------------
// Metrics

struct RunMetrics {
  std::string bidder;
  std::size_t horizon = 0;
  double utility = 0.0;          // sum (v - alpha d) z
  double expected_optimum = 0.0; // U(p; alpha, gamma, rho)
  double normalized_utility = 0.0;
  double spend = 0.0;
  double value = 0.0;
  double roi_balance = 0.0;
  bool has_spend = false;
  double roi_ratio = std::numeric_limits<double>::quiet_NaN();  // NaN without spend
  double hindsight = 0.0;
  double regret = 0.0;
  bool roi_satisfied = true;     // realized ROI >= gamma, vacuous without spend
  bool budget_satisfied = true;
  std::vector<double> depletion;  // cumulative spend / (rho T) after each period
  RunRecord record;

  double final_depletion() const { return depletion.empty() ? 0.0 : depletion.back(); }
};

inline RunMetrics compute_metrics(const BidderSpec& spec, const MarketModel& market,
                                  const BuyerParams& params, RunRecord rec) {
  RunMetrics m;
  m.bidder = spec.name();
  m.horizon = rec.horizon();
  m.utility = rec.utility;
  m.spend = rec.spend;
  m.value = rec.value;
  m.roi_balance = rec.roi_balance;
  m.has_spend = rec.spend > 0.0;
  if (m.has_spend) m.roi_ratio = rec.value / rec.spend;
  m.expected_optimum = solve_expected(market, params).objective;
  const double T = static_cast<double>(m.horizon);
  m.normalized_utility = m.expected_optimum > 0.0 && T > 0.0
                             ? (rec.utility / T) / m.expected_optimum
                             : std::numeric_limits<double>::quiet_NaN();
  m.hindsight = hindsight_opt(market, rec.types, params);
  m.regret = m.hindsight - rec.utility;
  m.roi_satisfied = !m.has_spend || rec.roi_satisfied();
  m.budget_satisfied = rec.budget_satisfied();
  m.depletion.resize(m.horizon);
  double cum = 0.0;
  const double budget = rec.budget > 0.0 ? rec.budget : 1.0;
  for (std::size_t t = 0; t < m.horizon; ++t) {
    if (rec.wins[t]) cum += market.cost(rec.types[t]);
    m.depletion[t] = cum / budget;
  }
  m.record = std::move(rec);
  return m;
}

/// One bidder on a supplied arrival stream.
inline RunMetrics run_bidder_trial(const MarketModel& market, const BuyerParams& params,
                                   const BidderSpec& spec, std::span<const std::size_t> types,
                                   RandomSource& rng) {
  return compute_metrics(spec, market, params, run_spec(spec, market, params, types, rng));
}

/// Draws T arrivals from `rng`, then runs the bidder with the same source.
inline RunMetrics run_bidder_trial(const MarketModel& market, const BuyerParams& params,
                                   const BidderSpec& spec, std::size_t horizon,
                                   RandomSource& rng) {
  const auto types = draw_arrivals(market, horizon, rng);
  return run_bidder_trial(market, params, spec, types, rng);
}

// ---------------------------------------------------------------------------
// Suites

/// Linear-interpolation quantile of an unsorted sample; NaNs are skipped.
inline double quantile(std::vector<double> xs, double q) {
  xs.erase(std::remove_if(xs.begin(), xs.end(), [](double x) { return std::isnan(x); }),
           xs.end());
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

struct ScenarioConfig {
  Regime regime = Regime::kAlphaDominant;
  BuyerParams params = default_params(Regime::kAlphaDominant);
  std::vector<std::pair<double, double>> support = grid_support();
  std::size_t instances = 10;
  std::size_t horizon = 10000;
  std::vector<BidderSpec> bidders = standard_roster();
  std::uint64_t seed = 1;

  static ScenarioConfig for_regime(Regime r) {
    ScenarioConfig c;
    c.regime = r;
    c.params = default_params(r);
    return c;
  }
};

enum class StreamPurpose : std::uint64_t { kInstance = 1, kArrivals = 2, kBidder = 3, kSweep = 4 };

inline std::uint64_t purpose_stream(Regime regime, std::size_t instance, StreamPurpose purpose,
                                    std::uint64_t extra = 0) {
  return stream_id({static_cast<std::uint64_t>(regime), instance,
                    static_cast<std::uint64_t>(purpose), extra});
}

struct InstanceResult {
  std::size_t index = 0;
  MarketModel market;
  std::vector<std::size_t> types;
  std::vector<RunMetrics> runs;  // one per roster entry, roster order
};

struct AggregateRow {
  std::string bidder;
  Regime regime = Regime::kAlphaDominant;
  double median_norm_utility = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double roi_attained_frac = 0.0;
  double final_depletion = 0.0;  // median over instances
};

struct SuiteResult {
  ScenarioConfig config;
  std::vector<InstanceResult> instances;
  std::vector<AggregateRow> aggregate;  // roster order
};

inline std::vector<AggregateRow> aggregate_suite(const ScenarioConfig& cfg,
                                                 const std::vector<InstanceResult>& instances) {
  std::vector<AggregateRow> rows;
  for (std::size_t b = 0; b < cfg.bidders.size(); ++b) {
    std::vector<double> norm, depl;
    double attained = 0.0;
    for (const auto& inst : instances) {
      const RunMetrics& m = inst.runs[b];
      norm.push_back(m.normalized_utility);
      depl.push_back(m.final_depletion());
      if (m.roi_satisfied) attained += 1.0;
    }
    AggregateRow row;
    row.bidder = cfg.bidders[b].name();
    row.regime = cfg.regime;
    row.median_norm_utility = quantile(norm, 0.5);
    row.q25 = quantile(norm, 0.25);
    row.q75 = quantile(norm, 0.75);
    row.roi_attained_frac = instances.empty() ? 0.0 : attained / static_cast<double>(instances.size());
    row.final_depletion = quantile(depl, 0.5);
    rows.push_back(row);
  }
  return rows;
}

/// Every roster bidder sees the same arrival stream within an instance.
/// Set keep_records to false to drop per-period records after metrics.
inline SuiteResult run_benchmark_suite(const ScenarioConfig& cfg, bool keep_records = true) {
  cfg.params.validate();
  if (cfg.horizon < 1) throw InvalidInput("horizon must be at least 1");
  SuiteResult out;
  out.config = cfg;
  for (std::size_t i = 0; i < cfg.instances; ++i) {
    InstanceResult inst;
    inst.index = i;
    RandomSource inst_rng(cfg.seed, purpose_stream(cfg.regime, i, StreamPurpose::kInstance));
    inst.market = sample_regime_instance(cfg.regime, cfg.params, cfg.support, inst_rng);
    RandomSource arrival_rng(cfg.seed, purpose_stream(cfg.regime, i, StreamPurpose::kArrivals));
    inst.types = draw_arrivals(inst.market, cfg.horizon, arrival_rng);
    for (std::size_t b = 0; b < cfg.bidders.size(); ++b) {
      RandomSource bid_rng(cfg.seed, purpose_stream(cfg.regime, i, StreamPurpose::kBidder, b));
      RunMetrics m = run_bidder_trial(inst.market, cfg.params, cfg.bidders[b], inst.types, bid_rng);
      if (!keep_records) {
        m.record = RunRecord{};
        m.depletion = {m.final_depletion()};
      }
      inst.runs.push_back(std::move(m));
    }
    if (!keep_records) inst.types.clear();
    out.instances.push_back(std::move(inst));
  }
  out.aggregate = aggregate_suite(cfg, out.instances);
  return out;
}

// ---------------------------------------------------------------------------
// Regret scaling

struct SweepPoint {
  std::size_t horizon = 0;
  double mean_regret = 0.0;
  double std_error = 0.0;
  std::size_t seeds = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> warnings;
};

/// Least-squares fit of log y on log x.
inline std::pair<double, double> loglog_fit(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw InvalidInput("log-log fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  const double denom = dn * sxx - sx * sx;
  if (denom == 0.0) throw InvalidInput("log-log fit needs distinct horizons");
  const double slope = (dn * sxy - sx * sy) / denom;
  return {slope, (sy - slope * sx) / dn};
}

inline SweepResult regret_scaling_sweep(const MarketModel& market, const BuyerParams& params,
                                        const BidderSpec& spec,
                                        std::span<const std::size_t> horizons, std::size_t seeds,
                                        std::uint64_t base_seed) {
  SweepResult out;
  if (horizons.size() < 3) out.warnings.push_back("fewer than 3 horizons in the slope fit");
  if (seeds < 20) out.warnings.push_back("fewer than 20 seeds per horizon");
  std::vector<double> xs, ys;
  for (std::size_t T : horizons) {
    SweepPoint pt;
    pt.horizon = T;
    pt.seeds = seeds;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) {
      RandomSource rng(base_seed, stream_id({static_cast<std::uint64_t>(StreamPurpose::kSweep),
                                             static_cast<std::uint64_t>(T), s}));
      const auto types = draw_arrivals(market, T, rng);
      const RunRecord rec = run_spec(spec, market, params, types, rng);
      const double regret = regret_of_run(market, rec.types, params, rec.utility);
      sum += regret;
      sum_sq += regret * regret;
    }
    const double n = static_cast<double>(std::max<std::size_t>(seeds, 1));
    pt.mean_regret = sum / n;
    pt.std_error = seeds > 1 ? std::sqrt(std::max(sum_sq / n - pt.mean_regret * pt.mean_regret,
                                                  0.0) / (n - 1.0))
                             : 0.0;
    out.points.push_back(pt);
    if (pt.mean_regret > 0.0) {
      xs.push_back(static_cast<double>(T));
      ys.push_back(pt.mean_regret);
    } else {
      out.warnings.push_back("nonpositive mean regret at T=" + std::to_string(T) +
                             " excluded from the fit");
    }
  }
  if (xs.size() >= 2) {
    const auto [slope, intercept] = loglog_fit(xs, ys);
    out.slope = slope;
    out.intercept = intercept;
  } else {
    out.warnings.push_back("not enough positive points for a slope");
  }
  return out;
}

}  // namespace bidlab
