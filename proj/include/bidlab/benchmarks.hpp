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

// Benchmark bidders: the conservative v/gamma bidder and three dual-pacing
// bidders whose multipliers follow projected stochastic subgradient steps.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "bidlab/auction.hpp"
#include "bidlab/core.hpp"
#include "bidlab/random.hpp"

namespace bidlab {

inline Bid conserv_bid(double v, double gamma) {
  if (!(gamma > 0.0)) throw InvalidInput("gamma must be positive");
  return Bid(v / gamma);
}

struct ConservBidder {
  double gamma;
  Bid bid(double v, RandomSource&) const { return conserv_bid(v, gamma); }
  void observe(const Observation&) {}
};

struct PacingState {
  double lambda_hat = 0.0;  // budget multiplier
  double mu_hat = 0.0;      // ROI multiplier
  double lambda_cap = 10.0;
  double mu_cap = 10.0;
  double step = 0.0;        // subgradient step, constant over the run

  void validate() const {
    if (!(lambda_cap >= 0.0) || !(mu_cap >= 0.0)) throw InvalidInput("dual caps must be >= 0");
    if (!(lambda_hat >= 0.0 && lambda_hat <= lambda_cap)) throw InvalidInput("lambda out of box");
    if (!(mu_hat >= 0.0 && mu_hat <= mu_cap)) throw InvalidInput("mu out of box");
    if (!(step >= 0.0)) throw InvalidInput("step must be nonnegative");
  }

  /// Step 1/sqrt(T); both multipliers start at their caps unless
  /// start_at_caps is false, in which case they start at zero.
  static PacingState for_horizon(std::size_t horizon, double lambda_cap = 10.0,
                                 double mu_cap = 10.0, bool start_at_caps = true) {
    PacingState s;
    s.lambda_cap = lambda_cap;
    s.mu_cap = mu_cap;
    if (start_at_caps) {
      s.lambda_hat = lambda_cap;
      s.mu_hat = mu_cap;
    }
    s.step = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(horizon, 1)));
    return s;
  }
};

/// (1 + mu) v / (alpha + gamma mu + lambda); a zero denominator yields the
/// always-win sentinel.
inline Bid paced_bid(double v, double alpha, double gamma, double lambda, double mu) {
  const double denom = alpha + gamma * mu + lambda;
  if (denom <= 0.0) return Bid::always_win();
  return Bid((1.0 + mu) * v / denom);
}

/// lambda <- Proj_[0, lambda_cap](lambda - step (rho - d z)).
inline PacingState update_budget_dual(PacingState s, double payment, double rho) {
  s.lambda_hat = std::clamp(s.lambda_hat - s.step * (rho - payment), 0.0, s.lambda_cap);
  return s;
}

/// mu <- Proj_[0, mu_cap](mu - step (v z - gamma d z)).
inline PacingState update_roi_dual(PacingState s, double won_value, double payment, double gamma) {
  s.mu_hat = std::clamp(s.mu_hat - s.step * (won_value - gamma * payment), 0.0, s.mu_cap);
  return s;
}

struct PacingStep {
  Bid bid;
  PacingState next;
};

/// Budget pacing: bid v / (alpha + lambda), then update lambda with the
/// realized payment d z.
inline PacingStep budget_pacing_step(const PacingState& s, double v, double payment, double alpha,
                                     double rho) {
  return {paced_bid(v, alpha, 0.0, s.lambda_hat, 0.0), update_budget_dual(s, payment, rho)};
}

/// ROI pacing: bid (1 + mu) v / (alpha + gamma mu), then update mu.
inline PacingStep roi_pacing_step(const PacingState& s, double v, double won_value, double payment,
                                  double alpha, double gamma) {
  return {paced_bid(v, alpha, gamma, 0.0, s.mu_hat), update_roi_dual(s, won_value, payment, gamma)};
}

/// Joint pacing: bid (1 + mu) v / (alpha + gamma mu + lambda), update both.
inline PacingStep joint_pacing_step(const PacingState& s, double v, double won_value,
                                    double payment, double alpha, double gamma, double rho) {
  return {paced_bid(v, alpha, gamma, s.lambda_hat, s.mu_hat),
          update_roi_dual(update_budget_dual(s, payment, rho), won_value, payment, gamma)};
}

enum class PacingKind { kBudget, kRoi, kJoint };

class PacingBidder {
 public:
  PacingBidder(PacingKind kind, const BuyerParams& params, PacingState init)
      : kind_(kind), params_(params), state_(init) {
    params.validate();
    init.validate();
  }

  const PacingState& state() const { return state_; }

  Bid bid(double v, RandomSource&) const {
    switch (kind_) {
      case PacingKind::kBudget:
        return paced_bid(v, params_.alpha, 0.0, state_.lambda_hat, 0.0);
      case PacingKind::kRoi:
        return paced_bid(v, params_.alpha, params_.gamma, 0.0, state_.mu_hat);
      case PacingKind::kJoint:
        return paced_bid(v, params_.alpha, params_.gamma, state_.lambda_hat, state_.mu_hat);
    }
    return Bid(0.0);
  }

  void observe(const Observation& o) {
    const double payment = o.win ? o.cost : 0.0;
    const double won_value = o.win ? o.value : 0.0;
    if (kind_ != PacingKind::kRoi) state_ = update_budget_dual(state_, payment, params_.rho);
    if (kind_ != PacingKind::kBudget) {
      state_ = update_roi_dual(state_, won_value, payment, params_.gamma);
    }
  }

 private:
  PacingKind kind_;
  BuyerParams params_;
  PacingState state_;
};

// ---------------------------------------------------------------------------
// ROI pacing with the exact optimal multiplier can still lose money:
// alpha = 0, v_t = v, d_t = v/(2 gamma) w.p. p and 3v/(2 gamma) otherwise.
// The optimal ROI multiplier is 2, the paced bid 3v/(2 gamma) wins every
// auction, and the expected ROI balance is T v (p - 1/2) < 0 for p < 1/2.

inline double example1_expected_roi(double p, double v, double gamma, double horizon) {
  (void)gamma;  // the balance does not depend on gamma
  return horizon * v * (p - 0.5);
}

struct MonteCarloMean {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Simulates the mu = 2 pacer on the two-point instance; returns the mean and
/// standard error of the per-period ROI balance.
inline MonteCarloMean simulate_example1(double p, double v, double gamma, std::size_t horizon,
                                        RandomSource& rng) {
  if (!(p > 0.0 && p < 0.5)) throw InvalidInput("example needs p in (0, 1/2)");
  const Bid bid = paced_bid(v, 0.0, gamma, 0.0, 2.0);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const double d = rng.bernoulli(p) ? v / (2.0 * gamma) : 3.0 * v / (2.0 * gamma);
    const double balance = bid.beats(d) ? v - gamma * d : 0.0;
    sum += balance;
    sum_sq += balance * balance;
  }
  const double n = static_cast<double>(horizon);
  MonteCarloMean out;
  out.mean = sum / n;
  const double var = std::max(sum_sq / n - out.mean * out.mean, 0.0);
  out.std_error = std::sqrt(var / n);
  return out;
}

}  // namespace bidlab
