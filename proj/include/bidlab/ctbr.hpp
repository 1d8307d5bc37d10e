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

// Conservative threshold-based bidding (CTBR).
//
// Each period the bidder submits a threshold bid for its current estimate
// (J, q), feeds the observed arrival type to a distribution learner, and
// recomputes (J, q) from the learned distribution with every constraint
// tightened by a confidence radius ell_t.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "bidlab/auction.hpp"
#include "bidlab/core.hpp"
#include "bidlab/hindsight.hpp"
#include "bidlab/random.hpp"

namespace bidlab {

// ---------------------------------------------------------------------------
// Threshold bids

/// Bid for the 1-based threshold type j: v / theta^j, with theta^0 = +inf
/// (bid zero) and theta^{K+1} = 0 (always win).
inline Bid bid_at_threshold(double value, std::size_t j, const MarketModel& market) {
  if (j == 0) return Bid(0.0);
  if (j > market.size()) return Bid::always_win();
  return Bid(value / market.ratio(j - 1));
}

/// Randomizes between v/theta^{head+1} (probability q) and v/theta^{head}.
/// Types up to `head` always win, type head+1 wins with probability exactly
/// q, later types never win. One uniform is consumed per call regardless of q.
inline Bid threshold_bid(double value, std::size_t head, double remainder,
                         const MarketModel& market, RandomSource& rng) {
  if (head > market.size()) throw InvalidInput("threshold head out of range");
  if (!(remainder >= 0.0) || !(remainder < 1.0)) {
    throw InvalidInput("threshold remainder must lie in [0, 1)");
  }
  const bool upper = rng.uniform() < remainder;
  return bid_at_threshold(value, upper ? head + 1 : head, market);
}

/// Known-distribution threshold bidding with a fixed (J, q).
class FixedThresholdBidder {
 public:
  FixedThresholdBidder(const MarketModel& market, std::size_t head, double remainder)
      : market_(&market), head_(head), remainder_(remainder) {}
  FixedThresholdBidder(const MarketModel& market, const ThresholdVector& tv)
      : FixedThresholdBidder(market, tv.head(), tv.remainder()) {}

  Bid bid(double v, RandomSource& rng) const {
    return threshold_bid(v, head_, remainder_, *market_, rng);
  }
  void observe(const Observation&) {}

 private:
  const MarketModel* market_;
  std::size_t head_;
  double remainder_;
};

// ---------------------------------------------------------------------------
// Learners

enum class LearnerKind { kEmpiricalEstimate, kSgdVanishing, kSgdConstant };

struct LearnerConfig {
  LearnerKind kind = LearnerKind::kEmpiricalEstimate;
  double eta = 0.0;  // SGD-constant step size
  std::size_t horizon = 0;

  static LearnerConfig empirical() { return {LearnerKind::kEmpiricalEstimate, 0.0, 0}; }
  static LearnerConfig sgd_vanishing() { return {LearnerKind::kSgdVanishing, 0.0, 0}; }
  /// Constant step eta = T^{-2/3} unless given.
  static LearnerConfig sgd_constant(std::size_t horizon, double eta = 0.0) {
    if (eta == 0.0) eta = std::pow(static_cast<double>(horizon), -2.0 / 3.0);
    return {LearnerKind::kSgdConstant, eta, horizon};
  }

  void validate() const {
    if (kind == LearnerKind::kSgdConstant && !(eta > 0.0 && eta < 1.0)) {
      throw InvalidInput("constant SGD step size must lie in (0, 1)");
    }
  }
};

/// One-hot occurrence vector s_t.
struct OccurrenceIndicator {
  std::size_t dim = 0;
  std::size_t type = 0;

  std::vector<double> expand() const {
    std::vector<double> s(dim, 0.0);
    s.at(type) = 1.0;
    return s;
  }
};

/// Euclidean projection onto the probability simplex (sort and threshold).
inline std::vector<double> project_simplex(std::span<const double> u) {
  const std::size_t K = u.size();
  if (K == 0) return {};
  std::vector<double> sorted(u.begin(), u.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < K; ++j) {
    cumsum += sorted[j];
    const double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) tau = candidate;
  }
  std::vector<double> out(K);
  double total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    out[k] = std::max(u[k] - tau, 0.0);
    total += out[k];
  }
  for (double& x : out) x /= total;
  return out;
}

/// Empirical estimate: p_{t+1} = (t p_t + s_t) / (t + 1).
inline std::vector<double> learner_update_ee(std::span<const double> p_hat,
                                             const OccurrenceIndicator& s, std::size_t t) {
  if (t < 1) throw InvalidInput("empirical update needs t >= 1");
  const double tt = static_cast<double>(t);
  std::vector<double> next(p_hat.size());
  for (std::size_t k = 0; k < p_hat.size(); ++k) {
    next[k] = (tt * p_hat[k] + (k == s.type ? 1.0 : 0.0)) / (tt + 1.0);
  }
  return next;
}

/// Projected SGD on f(p) = |p - p_true|^2 / 2 with stochastic gradient p_t - s_t.
inline std::vector<double> learner_update_sgd(std::span<const double> p_hat,
                                              const OccurrenceIndicator& s, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidInput("SGD step size must lie in [0, 1]");
  std::vector<double> step(p_hat.size());
  for (std::size_t k = 0; k < p_hat.size(); ++k) {
    step[k] = p_hat[k] - eta * (p_hat[k] - (k == s.type ? 1.0 : 0.0));
  }
  return project_simplex(step);
}

// ---------------------------------------------------------------------------
// Confidence schedules

enum class ScheduleKind { kEeTheory, kSgdVanishingTheory, kSgdConstantTheory, kPower, kConstant };

struct ConfidenceSchedule {
  ScheduleKind kind = ScheduleKind::kPower;
  std::size_t horizon = 0;   // T, theory schedules only
  std::size_t support = 0;   // K, EE theory only
  double eta = 0.0;          // SGD-constant theory only
  double exponent = 1.0;     // power only
  double normalizer = 1.0;   // power: max{d_max, w_max} sqrt(K)
  double constant = 0.0;     // constant only

  /// t^{-s} / (max{d_max, w_max} sqrt(K)).
  static ConfidenceSchedule power(double s, const MarketModel& market, double gamma) {
    ConfidenceSchedule c;
    c.kind = ScheduleKind::kPower;
    c.exponent = s;
    c.normalizer = std::max(market.max_cost(), market.max_abs_margin(gamma)) *
                   std::sqrt(static_cast<double>(market.size()));
    return c;
  }
  static ConfidenceSchedule ee_theory(std::size_t K, std::size_t T) {
    ConfidenceSchedule c;
    c.kind = ScheduleKind::kEeTheory;
    c.support = K;
    c.horizon = T;
    return c;
  }
  static ConfidenceSchedule sgd_vanishing_theory(std::size_t T) {
    ConfidenceSchedule c;
    c.kind = ScheduleKind::kSgdVanishingTheory;
    c.horizon = T;
    return c;
  }
  static ConfidenceSchedule sgd_constant_theory(std::size_t T, double eta) {
    ConfidenceSchedule c;
    c.kind = ScheduleKind::kSgdConstantTheory;
    c.horizon = T;
    c.eta = eta;
    return c;
  }
  static ConfidenceSchedule fixed(double value) {
    ConfidenceSchedule c;
    c.kind = ScheduleKind::kConstant;
    c.constant = value;
    return c;
  }

  void validate() const {
    switch (kind) {
      case ScheduleKind::kPower:
        if (!(exponent > 0.0) || !(normalizer > 0.0)) throw InvalidInput("bad power schedule");
        break;
      case ScheduleKind::kEeTheory:
        if (horizon < 1 || support < 1) throw InvalidInput("EE schedule needs T, K >= 1");
        break;
      case ScheduleKind::kSgdVanishingTheory:
        if (horizon < 2) throw InvalidInput("SGD schedule needs T >= 2");
        break;
      case ScheduleKind::kSgdConstantTheory:
        if (horizon < 2 || !(eta > 0.0 && eta < 1.0)) {
          throw InvalidInput("SGD-constant schedule needs T >= 2 and eta in (0, 1)");
        }
        break;
      case ScheduleKind::kConstant:
        if (!(constant >= 0.0)) throw InvalidInput("constant schedule must be nonnegative");
        break;
    }
  }

  /// ell_t for the 1-based period t.
  double at(std::size_t t) const {
    const double tt = static_cast<double>(std::max<std::size_t>(t, 1));
    const double T = static_cast<double>(horizon);
    switch (kind) {
      case ScheduleKind::kEeTheory:
        return std::sqrt(2.0 * static_cast<double>(support) * std::log(2.0 * T) / tt);
      case ScheduleKind::kSgdVanishingTheory:
        return std::sqrt((600.0 * std::log(T * std::log(T)) + 12.0) / tt);
      case ScheduleKind::kSgdConstantTheory: {
        const double lg = std::log(T * std::log(T));
        const double a = std::sqrt(2.0 + 16.0 * std::sqrt(std::max(lg, 0.0)));
        const double b = 2.0 * std::sqrt(1.0 + 72.0 * lg);
        const double base = std::max(1.0 - 2.0 * eta, 0.0);
        return a * std::pow(base, (tt - 1.0) / 2.0) + b * std::sqrt(eta);
      }
      case ScheduleKind::kPower:
        return std::pow(tt, -exponent) / normalizer;
      case ScheduleKind::kConstant:
        return constant;
    }
    return 0.0;
  }
};

// ---------------------------------------------------------------------------
// Conservative threshold estimates

/// Support data needed to turn a distribution estimate into (J, q). Built
/// from a MarketModel, or from any list ordered by non-increasing ratio.
struct ThresholdInputs {
  std::vector<double> cost;
  std::vector<double> margin;  // w^k = v^k - gamma d^k
  std::size_t kappa_alpha = 0;
  double rho = 0.0;
  double w_max = 0.0;
  double d_max = 0.0;

  std::size_t size() const { return cost.size(); }

  static ThresholdInputs from(std::span<const ArrivalType> arrivals, const BuyerParams& params) {
    ThresholdInputs in;
    in.rho = params.rho;
    for (std::size_t k = 0; k < arrivals.size(); ++k) {
      const auto& a = arrivals[k];
      in.cost.push_back(a.cost);
      in.margin.push_back(a.value - params.gamma * a.cost);
      in.w_max = std::max(in.w_max, std::abs(in.margin.back()));
      in.d_max = std::max(in.d_max, a.cost);
      if (a.value >= params.alpha * a.cost) in.kappa_alpha = k + 1;
    }
    return in;
  }
  static ThresholdInputs from(const MarketModel& market, const BuyerParams& params) {
    return from(std::span<const ArrivalType>(market.arrivals()), params);
  }
};

/// Power schedule normalized by the given support data.
inline ConfidenceSchedule power_schedule(double s, const ThresholdInputs& in) {
  ConfidenceSchedule c;
  c.kind = ScheduleKind::kPower;
  c.exponent = s;
  c.normalizer = std::max(in.d_max, in.w_max) * std::sqrt(static_cast<double>(in.size()));
  return c;
}

struct ConservativeEstimate {
  std::size_t roi_head = 0;     // r-hat
  std::size_t budget_head = 0;  // b-hat
  double q_roi = 0.0;           // q-hat^R before taking the positive part
  double q_budget = 0.0;        // q-hat^B before taking the positive part
  std::size_t head = 0;         // J-hat
  double remainder = 0.0;       // q-hat
  bool degenerate = false;      // zero estimated mass at a boundary type
};

/// Threshold estimates from p_hat with confidence radius ell:
///   r = max{k : sum_{l<=k} p_l w_l >= -sqrt(K) w_max ell}
///   q^R = (sum_{l<=r} p_l w_l - (sqrt(K)+2) w_max ell) / (p_{r+1} |w_{r+1}|)
///   b = max{k : sum_{l<=k} p_l d_l <= rho + sqrt(K) d_max ell}
///   q^B = (rho - sum_{l<=b} p_l d_l - (sqrt(K)+2) d_max ell) / (p_{b+1} d_{b+1})
/// and (J, q) = min{psi(r, q^R_+), psi(b, q^B_+), psi(kappa_alpha, 0)}.
/// All sums use the same p_hat.
inline ConservativeEstimate conservative_update(const ThresholdInputs& in,
                                                std::span<const double> p_hat, double ell) {
  const std::size_t K = in.size();
  if (p_hat.size() != K) throw InvalidInput("distribution estimate has wrong length");
  const double sqrt_k = std::sqrt(static_cast<double>(K));
  ConservativeEstimate e;

  double prefix = 0.0, prefix_at_r = 0.0;
  const double roi_floor = -sqrt_k * in.w_max * ell;
  for (std::size_t k = 0; k < K; ++k) {
    prefix += p_hat[k] * in.margin[k];
    if (prefix >= roi_floor) {
      e.roi_head = k + 1;
      prefix_at_r = prefix;
    }
  }
  if (e.roi_head < K) {
    const std::size_t next = e.roi_head;
    const double denom = p_hat[next] * std::abs(in.margin[next]);
    if (denom > 0.0) {
      e.q_roi = (prefix_at_r - (sqrt_k + 2.0) * in.w_max * ell) / denom;
    } else {
      e.degenerate = true;
    }
  }

  prefix = 0.0;
  double prefix_at_b = 0.0;
  const double budget_ceiling = in.rho + sqrt_k * in.d_max * ell;
  for (std::size_t k = 0; k < K; ++k) {
    prefix += p_hat[k] * in.cost[k];
    if (prefix <= budget_ceiling) {
      e.budget_head = k + 1;
      prefix_at_b = prefix;
    }
  }
  if (e.budget_head < K) {
    const std::size_t next = e.budget_head;
    const double denom = p_hat[next] * in.cost[next];
    if (denom > 0.0) {
      e.q_budget = (in.rho - prefix_at_b - (sqrt_k + 2.0) * in.d_max * ell) / denom;
    } else {
      e.degenerate = true;
    }
  }

  auto positive = [](double q) { return detail::clamp_remainder(std::max(q, 0.0)); };
  const ThresholdVector x_roi(K, e.roi_head, e.roi_head == K ? 0.0 : positive(e.q_roi));
  const ThresholdVector x_budget(K, e.budget_head,
                                 e.budget_head == K ? 0.0 : positive(e.q_budget));
  const ThresholdVector x_hat = tv_min(x_roi, x_budget, ThresholdVector(K, in.kappa_alpha, 0.0));
  e.head = x_hat.head();
  e.remainder = x_hat.remainder();
  return e;
}

// ---------------------------------------------------------------------------
// The CTBR bidder

struct CtbrState {
  std::size_t t = 1;
  std::vector<double> p_hat;
  double ell = 0.0;
  std::size_t roi_head = 1;
  std::size_t budget_head = 1;
  double q_roi = 0.0;
  double q_budget = 0.0;
  std::size_t head = 1;
  double remainder = 0.0;
  std::size_t degenerate_updates = 0;
};

/// Distribution learner plus conservative re-estimation; shared by the
/// auction bidder and the posted-price buyer.
class CtbrEstimator {
 public:
  CtbrEstimator(ThresholdInputs inputs, LearnerConfig learner, ConfidenceSchedule schedule)
      : in_(std::move(inputs)), learner_(learner), schedule_(schedule) {
    if (in_.size() == 0) throw InvalidInput("empty support");
    learner_.validate();
    schedule_.validate();
    const std::size_t K = in_.size();
    // p_1 uniform, J_1 = 1, q_1 = 0.
    state_.p_hat.assign(K, 1.0 / static_cast<double>(K));
    state_.ell = schedule_.at(1);
  }

  const CtbrState& state() const { return state_; }
  const ThresholdInputs& inputs() const { return in_; }

  /// Learner step with the observed type, then re-estimation with ell_t.
  void update(std::size_t type) {
    const OccurrenceIndicator s{in_.size(), type};
    switch (learner_.kind) {
      case LearnerKind::kEmpiricalEstimate:
        state_.p_hat = learner_update_ee(state_.p_hat, s, state_.t);
        break;
      case LearnerKind::kSgdVanishing:
        state_.p_hat = learner_update_sgd(state_.p_hat, s, 1.0 / static_cast<double>(state_.t));
        break;
      case LearnerKind::kSgdConstant:
        state_.p_hat = learner_update_sgd(state_.p_hat, s, learner_.eta);
        break;
    }
    const ConservativeEstimate e = conservative_update(in_, state_.p_hat, state_.ell);
    state_.roi_head = e.roi_head;
    state_.budget_head = e.budget_head;
    state_.q_roi = e.q_roi;
    state_.q_budget = e.q_budget;
    state_.head = e.head;
    state_.remainder = e.remainder;
    if (e.degenerate) ++state_.degenerate_updates;
    ++state_.t;
    state_.ell = schedule_.at(state_.t);
  }

 private:
  ThresholdInputs in_;
  LearnerConfig learner_;
  ConfidenceSchedule schedule_;
  CtbrState state_;
};

class CtbrBidder {
 public:
  CtbrBidder(const MarketModel& market, const BuyerParams& params, LearnerConfig learner,
             ConfidenceSchedule schedule)
      : market_(&market), estimator_(ThresholdInputs::from(market, params), learner, schedule) {
    params.validate();
  }

  const CtbrState& state() const { return estimator_.state(); }
  std::size_t kappa_alpha() const { return estimator_.inputs().kappa_alpha; }

  Bid bid(double v, RandomSource& rng) const {
    const auto& s = estimator_.state();
    return threshold_bid(v, s.head, s.remainder, *market_, rng);
  }
  void observe(const Observation& obs) { estimator_.update(obs.type); }

  struct StepResult {
    Bid bid;
    bool win = false;
  };
  /// One full period for an arrival of the given type.
  StepResult step(std::size_t type, RandomSource& rng) {
    const double v = market_->value(type);
    const double d = market_->cost(type);
    StepResult r{bid(v, rng), false};
    r.win = r.bid.beats(d);
    observe(Observation{type, v, d, r.win});
    return r;
  }

 private:
  const MarketModel* market_;
  CtbrEstimator estimator_;
};

struct CtbrRun {
  RunRecord record;
  std::vector<std::size_t> heads;      // J-hat_t used in period t
  std::vector<double> remainders;      // q-hat_t used in period t
};

/// Runs CTBR over a supplied arrival stream, recording the (J, q) trace.
inline CtbrRun ctbr_run(const MarketModel& market, const BuyerParams& params,
                        LearnerConfig learner, ConfidenceSchedule schedule,
                        std::span<const std::size_t> types, RandomSource& rng,
                        SimOptions options = {}) {
  CtbrBidder bidder(market, params, learner, schedule);
  CtbrRun run;
  run.heads.reserve(types.size());
  run.remainders.reserve(types.size());
  struct Tracing {
    CtbrBidder* inner;
    CtbrRun* out;
    Bid bid(double v, RandomSource& r) {
      out->heads.push_back(inner->state().head);
      out->remainders.push_back(inner->state().remainder);
      return inner->bid(v, r);
    }
    void observe(const Observation& o) { inner->observe(o); }
  } tracing{&bidder, &run};
  run.record = simulate(tracing, market, params, types, rng, options);
  return run;
}

/// Draws T arrivals from the market, then bids on them with the same source.
inline CtbrRun ctbr_run(const MarketModel& market, const BuyerParams& params,
                        LearnerConfig learner, ConfidenceSchedule schedule, std::size_t horizon,
                        RandomSource& rng, SimOptions options = {}) {
  if (horizon < 1) throw InvalidInput("horizon must be at least 1");
  const std::vector<std::size_t> types = draw_arrivals(market, horizon, rng);
  return ctbr_run(market, params, learner, schedule, types, rng, options);
}

}  // namespace bidlab
