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

// Exact solver for the two-constraint fractional program
//
//   U(n; alpha, gamma, c) = max_{x in [0,1]^K} sum_k n^k (v^k - alpha d^k) x^k
//        s.t. sum_k n^k (v^k - gamma d^k) x^k >= 0      (ROI)
//             sum_k n^k d^k x^k <= c                    (budget)
//
// over a support sorted by decreasing v/d. The optimum is the elementwise
// minimum of three threshold vectors (ROI, budget, capital cost), computed
// in O(K). lp_vertex_oracle() solves the same LP by brute-force vertex
// enumeration and shares no code with the closed form.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bidlab/core.hpp"

namespace bidlab {

struct HindsightSolution {
  std::size_t roi_head = 0;     // r
  std::size_t budget_head = 0;  // b
  std::size_t kappa_alpha = 0;
  double q_roi = 0.0;
  double q_budget = 0.0;
  std::size_t head = 0;  // J
  double remainder = 0.0;  // q
  ThresholdVector solution;
  double objective = 0.0;
  double roi_slack = 0.0;     // sum n w x
  double budget_slack = 0.0;  // c - sum n d x
  double scale = 1.0;         // 1 + |c| + sum n d, for slack tolerances
  std::vector<std::string> warnings;

  bool roi_binding(double tol = 1e-9) const { return std::abs(roi_slack) <= tol * scale; }
  bool budget_binding(double tol = 1e-9) const { return std::abs(budget_slack) <= tol * scale; }
};

struct ArrivalCounts {
  std::vector<double> counts;
  std::size_t total = 0;
};

namespace detail {

// Largest q strictly below one; guards the closed-form quotients against
// rounding up to exactly 1.
inline constexpr double kBelowOne = 1.0 - std::numeric_limits<double>::epsilon() / 2;

inline double clamp_remainder(double q) { return std::clamp(q, 0.0, kBelowOne); }

}  // namespace detail

/// Closed-form threshold solution. Weights may contain zeros: a zero-weight
/// type can never be the fractional boundary type because the prefix sums
/// do not move across it, so the quotients stay well defined.
inline HindsightSolution solve_threshold(std::span<const double> weights, double alpha,
                                         double gamma, double cap,
                                         std::span<const ArrivalType> arrivals) {
  const std::size_t K = arrivals.size();
  if (K == 0) throw InvalidInput("empty support");
  if (weights.size() != K) throw InvalidInput("weights length does not match support size");
  if (!(cap > 0.0)) throw InvalidInput("budget cap must be positive");
  for (double n : weights) {
    if (!(n >= 0.0) || !std::isfinite(n)) throw InvalidInput("weights must be nonnegative");
  }

  HindsightSolution s;
  std::vector<double> margin(K);
  double weighted_cost = 0.0;
  double weighted_abs_margin = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    margin[k] = arrivals[k].value - gamma * arrivals[k].cost;
    weighted_cost += weights[k] * arrivals[k].cost;
    weighted_abs_margin += weights[k] * std::abs(margin[k]);
  }
  s.scale = 1.0 + std::abs(cap) + weighted_cost;
  const double degenerate_tol = kNormalizationTol * (1.0 + weighted_abs_margin + weighted_cost);

  // ROI threshold: r = max{k : sum_{l<=k} n^l w^l >= 0}.
  {
    double prefix = 0.0;
    double prefix_at_r = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      prefix += weights[k] * margin[k];
      if (std::abs(prefix) <= degenerate_tol && weights[k] > 0.0) {
        s.warnings.push_back("ROI partial sum at type " + std::to_string(k + 1) +
                             " is numerically zero");
      }
      if (prefix >= 0.0) {
        s.roi_head = k + 1;
        prefix_at_r = prefix;
      }
    }
    if (s.roi_head < K) {
      // r = 0 has an empty prefix; then w^1 < 0 and the quotient is zero.
      const std::size_t next = s.roi_head;
      const double denom = weights[next] * std::abs(margin[next]);
      s.q_roi = denom > 0.0 ? detail::clamp_remainder(prefix_at_r / denom) : 0.0;
    }
  }

  // Budget threshold: b = max{k : sum_{l<=k} n^l d^l <= c}.
  {
    double prefix = 0.0;
    double prefix_at_b = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      prefix += weights[k] * arrivals[k].cost;
      if (std::abs(cap - prefix) <= degenerate_tol && weights[k] > 0.0) {
        s.warnings.push_back("budget residual at type " + std::to_string(k + 1) +
                             " is numerically zero");
      }
      if (prefix <= cap) {
        s.budget_head = k + 1;
        prefix_at_b = prefix;
      }
    }
    if (s.budget_head < K) {
      const std::size_t next = s.budget_head;
      const double denom = weights[next] * arrivals[next].cost;
      s.q_budget = denom > 0.0 ? detail::clamp_remainder((cap - prefix_at_b) / denom) : 0.0;
    }
  }

  // kappa_alpha = max{k : v^k >= alpha d^k}; ratios decrease so this is a prefix.
  for (std::size_t k = 0; k < K; ++k) {
    if (arrivals[k].value >= alpha * arrivals[k].cost) s.kappa_alpha = k + 1;
  }

  const ThresholdVector x_roi(K, s.roi_head, s.roi_head == K ? 0.0 : s.q_roi);
  const ThresholdVector x_budget(K, s.budget_head, s.budget_head == K ? 0.0 : s.q_budget);
  const ThresholdVector x_alpha(K, s.kappa_alpha, 0.0);
  s.solution = tv_min(x_roi, x_budget, x_alpha);
  s.head = s.solution.head();
  s.remainder = s.solution.remainder();

  double roi = 0.0;
  double spend = 0.0;
  double obj = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double x = s.solution[k];
    if (x == 0.0) continue;
    obj += weights[k] * (arrivals[k].value - alpha * arrivals[k].cost) * x;
    roi += weights[k] * margin[k] * x;
    spend += weights[k] * arrivals[k].cost * x;
  }
  s.objective = obj;
  s.roi_slack = roi;
  s.budget_slack = cap - spend;
  return s;
}

inline HindsightSolution solve_threshold(std::span<const double> weights, double alpha,
                                         double gamma, double cap, const MarketModel& market) {
  return solve_threshold(weights, alpha, gamma, cap,
                         std::span<const ArrivalType>(market.arrivals()));
}

/// The expected-value program U(p; alpha, gamma, rho).
inline HindsightSolution solve_expected(const MarketModel& market, const BuyerParams& params) {
  return solve_threshold(market.probs(), params.alpha, params.gamma, params.rho, market);
}

struct OracleResult {
  std::vector<double> x;
  double objective = 0.0;
};

/// Brute-force LP optimum by vertex enumeration. A basic optimal solution of
/// a box-constrained LP with two side constraints has at most two fractional
/// coordinates, so enumerating every fractional set F (|F| <= 2), every 0/1
/// assignment of the rest, and every choice of tight constraints covers all
/// vertices. Ties keep the lexicographically largest x.
inline OracleResult lp_vertex_oracle(std::span<const double> weights, double alpha, double gamma,
                                     double cap, std::span<const ArrivalType> arrivals) {
  const std::size_t K = arrivals.size();
  if (K == 0) throw InvalidInput("empty support");
  if (K > 12) throw InvalidInput("vertex oracle supports at most 12 arrival types");
  if (weights.size() != K) throw InvalidInput("weights length does not match support size");

  std::vector<double> obj(K), roi(K), spend(K);
  double scale = 1.0 + std::abs(cap);
  for (std::size_t k = 0; k < K; ++k) {
    obj[k] = weights[k] * (arrivals[k].value - alpha * arrivals[k].cost);
    roi[k] = weights[k] * (arrivals[k].value - gamma * arrivals[k].cost);
    spend[k] = weights[k] * arrivals[k].cost;
    scale += std::abs(roi[k]) + spend[k];
  }
  const double feas_tol = 1e-10 * scale;
  const double box_tol = 1e-10;

  OracleResult best;
  best.objective = -std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<double>& x) {
    double f = 0.0, g_roi = 0.0, g_spend = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      if (x[k] < -box_tol || x[k] > 1.0 + box_tol) return;
      f += obj[k] * x[k];
      g_roi += roi[k] * x[k];
      g_spend += spend[k] * x[k];
    }
    if (g_roi < -feas_tol || g_spend > cap + feas_tol) return;
    const double tie = 1e-12 * (1.0 + std::abs(f));
    if (best.x.empty() || f > best.objective + tie ||
        (f >= best.objective - tie && std::lexicographical_compare(best.x.begin(), best.x.end(),
                                                                   x.begin(), x.end()))) {
      best.objective = f;
      best.x = x;
    }
  };

  std::vector<double> x(K);
  std::vector<std::size_t> rest;
  rest.reserve(K);
  // Each fractional set is encoded as (i, j) with i <= j <= K; i == K means
  // no fractional coordinate, j == K means only i is fractional.
  for (std::size_t i = 0; i <= K; ++i) {
    for (std::size_t j = (i == K ? K : i + 1); j <= K; ++j) {
      const std::size_t n_frac = (i == K) ? 0 : (j == K ? 1 : 2);
      rest.clear();
      for (std::size_t k = 0; k < K; ++k) {
        if (k != i && k != j) rest.push_back(k);
      }
      const std::size_t combos = std::size_t{1} << rest.size();
      for (std::size_t mask = 0; mask < combos; ++mask) {
        double base_roi = 0.0, base_spend = 0.0;
        std::fill(x.begin(), x.end(), 0.0);
        for (std::size_t r = 0; r < rest.size(); ++r) {
          if (mask & (std::size_t{1} << r)) {
            x[rest[r]] = 1.0;
            base_roi += roi[rest[r]];
            base_spend += spend[rest[r]];
          }
        }
        if (n_frac == 0) {
          consider(x);
        } else if (n_frac == 1) {
          // ROI tight: roi_i x_i = -base_roi; budget tight: spend_i x_i = cap - base_spend.
          if (roi[i] != 0.0) {
            x[i] = -base_roi / roi[i];
            consider(x);
          }
          if (spend[i] != 0.0) {
            x[i] = (cap - base_spend) / spend[i];
            consider(x);
          }
          x[i] = 0.0;
        } else {
          // Both tight: [roi_i roi_j; spend_i spend_j] [x_i; x_j] = [-base_roi; cap - base_spend].
          const double det = roi[i] * spend[j] - roi[j] * spend[i];
          if (det != 0.0) {
            const double rhs1 = -base_roi;
            const double rhs2 = cap - base_spend;
            x[i] = (rhs1 * spend[j] - roi[j] * rhs2) / det;
            x[j] = (roi[i] * rhs2 - rhs1 * spend[i]) / det;
            consider(x);
          }
        }
      }
    }
  }
  if (best.x.empty()) throw InvalidInput("vertex oracle found no feasible point");
  for (double& v : best.x) v = std::clamp(v, 0.0, 1.0);
  return best;
}

inline OracleResult lp_vertex_oracle(std::span<const double> weights, double alpha, double gamma,
                                     double cap, const MarketModel& market) {
  return lp_vertex_oracle(weights, alpha, gamma, cap,
                          std::span<const ArrivalType>(market.arrivals()));
}

inline ArrivalCounts count_arrivals(const MarketModel& market, std::span<const std::size_t> types) {
  ArrivalCounts c;
  c.counts.assign(market.size(), 0.0);
  for (std::size_t k : types) {
    if (k >= market.size()) throw InvalidInput("arrival type index out of range");
    c.counts[k] += 1.0;
  }
  c.total = types.size();
  return c;
}

/// OPT over a realized stream of type indices: U(N; alpha, gamma, rho T).
/// Types that never occurred carry zero weight, which the closed form
/// handles exactly like dropping them.
inline double hindsight_opt(const MarketModel& market, std::span<const std::size_t> types,
                            const BuyerParams& params) {
  if (types.empty()) return 0.0;
  const ArrivalCounts counts = count_arrivals(market, types);
  return solve_threshold(counts.counts, params.alpha, params.gamma,
                         params.rho * static_cast<double>(counts.total), market)
      .objective;
}

/// Same as above for a realization given as (value, cost) pairs.
inline double hindsight_opt(const MarketModel& market,
                            std::span<const std::pair<double, double>> realization,
                            const BuyerParams& params) {
  std::vector<std::size_t> types;
  types.reserve(realization.size());
  for (const auto& [v, d] : realization) {
    const std::size_t k = market.find(v, d);
    if (k == market.size()) throw InvalidInput("realized pair is not in the market support");
    types.push_back(k);
  }
  return hindsight_opt(market, types, params);
}

/// OPT minus the realized utility sum (v_t - alpha d_t) z_t.
inline double regret_of_run(const MarketModel& market, std::span<const std::size_t> types,
                            const BuyerParams& params, double realized_utility) {
  return hindsight_opt(market, types, params) - realized_utility;
}

}  // namespace bidlab
