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

// Seller side of the posted-price game: the buyer's best response to a
// fixed price, the induced revenue curve, and an episodic binary-search
// pricing policy that only observes take/leave outcomes.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bidlab/core.hpp"
#include "bidlab/ctbr.hpp"
#include "bidlab/hindsight.hpp"
#include "bidlab/random.hpp"

namespace bidlab {

/// Buyer valuations V^1 > ... > V^N with distribution g, seller prices
/// D^1 > ... > D^M, and the buyer's (hidden) gamma and rho.
class PricingModel {
 public:
  PricingModel(std::vector<double> valuations, std::vector<double> probs,
               std::vector<double> prices, double gamma, double rho)
      : valuations_(std::move(valuations)),
        probs_(std::move(probs)),
        prices_(std::move(prices)),
        gamma_(gamma),
        rho_(rho) {
    if (valuations_.empty()) throw InvalidInput("pricing model needs at least one valuation");
    if (prices_.empty()) throw InvalidInput("pricing model needs at least one price");
    detail::validate_probs(probs_, valuations_.size());
    detail::renormalize(probs_);
    auto strictly_decreasing = [](const std::vector<double>& xs, const char* what) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !std::isfinite(xs[i])) {
          throw InvalidInput(std::string(what) + " must be positive");
        }
        if (i > 0 && !(xs[i] < xs[i - 1])) {
          throw InvalidInput(std::string(what) + " must be strictly decreasing");
        }
      }
    };
    strictly_decreasing(valuations_, "valuations");
    strictly_decreasing(prices_, "prices");
    if (!(gamma_ > 0.0)) throw InvalidInput("gamma must be positive");
    if (!(rho_ > 0.0)) throw InvalidInput("rho must be positive");
  }

  const std::vector<double>& valuations() const { return valuations_; }
  const std::vector<double>& probs() const { return probs_; }
  const std::vector<double>& prices() const { return prices_; }
  double gamma() const { return gamma_; }
  double rho() const { return rho_; }
  std::size_t num_valuations() const { return valuations_.size(); }
  std::size_t num_prices() const { return prices_.size(); }
  double max_price() const { return prices_.front(); }
  double min_price() const { return prices_.back(); }

  /// 0-based index of the listed price equal to d, or num_prices() if absent.
  std::size_t price_index(double d) const {
    for (std::size_t m = 0; m < prices_.size(); ++m) {
      if (std::abs(prices_[m] - d) <= kInputTol * std::max(1.0, std::abs(d))) return m;
    }
    return prices_.size();
  }

  /// Arrivals (V^n, d) for a fixed price d, ordered by decreasing ratio.
  std::vector<ArrivalType> arrivals_at(double d) const {
    std::vector<ArrivalType> a;
    a.reserve(valuations_.size());
    for (double v : valuations_) a.push_back({v, d});
    return a;
  }

 private:
  std::vector<double> valuations_;
  std::vector<double> probs_;
  std::vector<double> prices_;
  double gamma_;
  double rho_;
};

/// Six valuations, 21 prices from 0.5 down to 0.1 and rho = 0.2.
inline PricingModel demo_pricing_model(double gamma) {
  std::vector<double> prices;
  for (int i = 0; i <= 20; ++i) prices.push_back(static_cast<double>(50 - 2 * i) / 100.0);
  return PricingModel({0.6, 0.5, 0.4, 0.3, 0.2, 0.1}, {0.1, 0.1, 0.2, 0.1, 0.2, 0.3}, prices,
                      gamma, 0.2);
}

struct Assumption1Report {
  bool holds = true;
  std::vector<bool> price_ok;  // V^N < gamma d < V^1 at D^m
  std::vector<std::string> violations;
};

inline Assumption1Report check_assumption1(const PricingModel& model) {
  Assumption1Report r;
  const double gamma = model.gamma();
  const double v_top = model.valuations().front();
  const double v_bottom = model.valuations().back();
  for (std::size_t m = 0; m < model.num_prices(); ++m) {
    const double d = model.prices()[m];
    bool ok = true;
    if (!(v_bottom < gamma * d)) {
      ok = false;
      r.violations.push_back("V^N >= gamma d at price " + std::to_string(d));
    }
    if (!(v_top > gamma * d)) {
      ok = false;
      r.violations.push_back("V^1 <= gamma d at price " + std::to_string(d));
    }
    double mean_margin = 0.0;
    for (std::size_t n = 0; n < model.num_valuations(); ++n) {
      mean_margin += (model.valuations()[n] - gamma * d) * model.probs()[n];
    }
    if (std::abs(mean_margin) <= kNormalizationTol) {
      ok = false;
      r.violations.push_back("expected ROI margin vanishes at price " + std::to_string(d));
    }
    r.price_ok.push_back(ok);
    r.holds = r.holds && ok;
  }
  if (!(model.max_price() > model.rho() && model.rho() > model.min_price())) {
    r.holds = false;
    r.violations.push_back("rho must lie strictly between the smallest and largest price");
  }
  return r;
}

/// Buyer's best response U(d): value-maximizing (alpha = 0) threshold
/// solution over arrivals (V^n, d) with weights g and budget rho.
inline HindsightSolution u_of_d(const PricingModel& model, double d) {
  if (!(d > 0.0)) throw InvalidInput("price must be positive");
  const auto arrivals = model.arrivals_at(d);
  return solve_threshold(model.probs(), 0.0, model.gamma(), model.rho(),
                         std::span<const ArrivalType>(arrivals));
}

/// Take probability sum_n g^n x_d^n.
inline double take_probability(const PricingModel& model, const HindsightSolution& sol) {
  double take = 0.0;
  for (std::size_t n = 0; n < model.num_valuations(); ++n) take += model.probs()[n] * sol.solution[n];
  return take;
}

/// pi(d) = d sum_n g^n x_d^n.
inline double revenue_pi(const PricingModel& model, double d) {
  return d * take_probability(model, u_of_d(model, d));
}

enum class PriceClass { kNonBinding, kBudgetBinding, kRoiBinding, kBudgetAndRoiBinding };

inline const char* to_string(PriceClass c) {
  switch (c) {
    case PriceClass::kNonBinding:
      return "non_binding";
    case PriceClass::kBudgetBinding:
      return "budget_binding";
    case PriceClass::kRoiBinding:
      return "roi_binding";
    case PriceClass::kBudgetAndRoiBinding:
      return "budget_and_roi_binding";
  }
  return "?";
}

inline bool has_budget(PriceClass c) {
  return c == PriceClass::kBudgetBinding || c == PriceClass::kBudgetAndRoiBinding;
}
inline bool has_roi(PriceClass c) {
  return c == PriceClass::kRoiBinding || c == PriceClass::kBudgetAndRoiBinding;
}

inline constexpr double kClassifyTol = 1e-9;

inline PriceClass classify_solution(const HindsightSolution& sol) {
  const bool roi = sol.roi_binding(kClassifyTol);
  const bool budget = sol.budget_binding(kClassifyTol);
  if (roi && budget) return PriceClass::kBudgetAndRoiBinding;
  if (roi) return PriceClass::kRoiBinding;
  if (budget) return PriceClass::kBudgetBinding;
  return PriceClass::kNonBinding;
}

inline PriceClass classify_price(const PricingModel& model, double d) {
  return classify_solution(u_of_d(model, d));
}

struct RevenuePoint {
  double price = 0.0;
  ThresholdVector solution;
  double take = 0.0;
  double revenue = 0.0;
  PriceClass cls = PriceClass::kNonBinding;
  double roi_slack = 0.0;
  double budget_slack = 0.0;
};

inline RevenuePoint revenue_point(const PricingModel& model, double d) {
  const HindsightSolution sol = u_of_d(model, d);
  RevenuePoint p;
  p.price = d;
  p.solution = sol.solution;
  p.take = take_probability(model, sol);
  p.revenue = d * p.take;
  p.cls = classify_solution(sol);
  p.roi_slack = sol.roi_slack;
  p.budget_slack = sol.budget_slack;
  return p;
}

/// Revenue points for every listed price, in listed (decreasing) order.
inline std::vector<RevenuePoint> revenue_curve(const PricingModel& model) {
  std::vector<RevenuePoint> curve;
  curve.reserve(model.num_prices());
  for (double d : model.prices()) curve.push_back(revenue_point(model, d));
  return curve;
}

inline double max_revenue(const PricingModel& model) {
  double best = 0.0;
  for (const auto& p : revenue_curve(model)) best = std::max(best, p.revenue);
  return best;
}

/// Smallest gap between two distinct revenue values, or +inf if all equal.
inline double min_revenue_gap(const PricingModel& model, double tie_tol = 1e-12) {
  std::vector<double> r;
  for (const auto& p : revenue_curve(model)) r.push_back(p.revenue);
  std::sort(r.begin(), r.end());
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < r.size(); ++i) {
    const double diff = r[i] - r[i - 1];
    if (diff > tie_tol) gap = std::min(gap, diff);
  }
  return gap;
}

// ---------------------------------------------------------------------------
// Bell-shape verification

struct BellShapeReport {
  bool pass = true;
  std::vector<RevenuePoint> curve;  // listed (decreasing price) order
  // 1-based indices into the listed prices; nullopt when the class is absent.
  std::optional<std::size_t> last_non_binding;
  std::optional<std::size_t> first_budget;  // lowest-priced budget-binding price
  std::optional<std::size_t> first_roi;     // lowest-priced ROI-binding price
  std::vector<std::size_t> plateau;         // every budget-binding price
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool plateau_empty() const { return plateau.empty(); }
  double plateau_revenue() const {
    return plateau.empty() ? std::numeric_limits<double>::quiet_NaN()
                           : curve[plateau.front() - 1].revenue;
  }

  std::string summary() const {
    std::string s = pass ? "bell-shape: pass\n" : "bell-shape: FAIL\n";
    auto idx = [](const std::optional<std::size_t>& i) {
      return i ? std::to_string(*i) : std::string("none");
    };
    s += "last non-binding price index: " + idx(last_non_binding) + "\n";
    s += "first budget-binding price index: " + idx(first_budget) + "\n";
    s += "first ROI-binding price index: " + idx(first_roi) + "\n";
    if (plateau.empty()) {
      s += "plateau: empty\n";
    } else {
      s += "plateau: indices " + std::to_string(plateau.front()) + ".." +
           std::to_string(plateau.back()) + " revenue " +
           std::to_string(plateau_revenue()) + "\n";
    }
    for (const auto& v : violations) s += "violation: " + v + "\n";
    for (const auto& w : warnings) s += "warning: " + w + "\n";
    return s;
  }
};

/// Walks the prices from cheapest to most expensive and checks that revenue
/// rises over non-binding prices, then plateaus while the budget binds, then
/// falls once ROI binds. Prices that violate the per-price Assumption-1
/// bounds only need weakly falling revenue.
inline BellShapeReport bell_shape_check(const PricingModel& model) {
  BellShapeReport rep;
  rep.curve = revenue_curve(model);
  const Assumption1Report a1 = check_assumption1(model);
  for (const auto& v : a1.violations) rep.warnings.push_back(v);

  const std::size_t M = model.num_prices();
  const double tol = kClassifyTol * (1.0 + model.max_price());
  bool seen_budget = false;
  bool seen_roi = false;
  auto price_name = [&](std::size_t m) {
    return "D^" + std::to_string(m + 1) + "=" + std::to_string(model.prices()[m]);
  };
  auto fail = [&](std::string msg) {
    rep.pass = false;
    rep.violations.push_back(std::move(msg));
  };

  for (std::size_t step = 0; step < M; ++step) {
    const std::size_t m = M - 1 - step;  // ascending price
    const RevenuePoint& cur = rep.curve[m];
    const RevenuePoint* prev = step == 0 ? nullptr : &rep.curve[m + 1];

    if (cur.cls == PriceClass::kNonBinding) {
      if (seen_budget) fail("non-binding " + price_name(m) + " after a budget-binding price");
      if (seen_roi) fail("non-binding " + price_name(m) + " after an ROI-binding price");
      if (prev && prev->cls == PriceClass::kNonBinding && !(cur.revenue > prev->revenue + tol)) {
        fail("revenue does not increase into " + price_name(m));
      }
      rep.last_non_binding = m + 1;
      if (std::abs(cur.revenue - cur.price) > tol) {
        fail("non-binding " + price_name(m) + " has revenue != price");
      }
    }
    if (has_budget(cur.cls)) {
      if (seen_roi && !has_roi(cur.cls)) {
        fail("budget-binding " + price_name(m) + " after an ROI-binding price");
      }
      if (!seen_budget) rep.first_budget = m + 1;
      seen_budget = true;
      rep.plateau.insert(rep.plateau.begin(), m + 1);
      if (std::abs(cur.revenue - model.rho()) > tol) {
        fail("budget-binding " + price_name(m) + " has revenue != rho");
      }
    }
    if (has_roi(cur.cls)) {
      if (seen_roi && prev) {
        const bool strict = a1.price_ok[m] && a1.price_ok[m + 1];
        const bool ok = strict ? cur.revenue < prev->revenue - tol
                               : cur.revenue <= prev->revenue + tol;
        if (!ok) fail("revenue does not decrease into " + price_name(m));
        if (!strict && ok) {
          rep.warnings.push_back("only weak decrease checked at " + price_name(m));
        }
      }
      if (!seen_roi) rep.first_roi = m + 1;
      seen_roi = true;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Buyers

/// A buyer callback: given the 1-based period and the posted price, returns
/// whether the buyer takes it.
template <class F>
concept PostedPriceBuyer = requires(F f, std::size_t t, double d) {
  { f(t, d) } -> std::convertible_to<bool>;
};

/// Idealized buyer that takes price d with probability pi(d)/d.
class ClairvoyantBuyer {
 public:
  ClairvoyantBuyer(const PricingModel& model, RandomSource rng)
      : model_(&model), rng_(std::move(rng)) {}

  double take_probability(double d) {
    auto it = cache_.find(d);
    if (it == cache_.end()) {
      it = cache_.emplace(d, bidlab::take_probability(*model_, u_of_d(*model_, d))).first;
    }
    return it->second;
  }

  bool operator()(std::size_t, double d) { return rng_.bernoulli(take_probability(d)); }

 private:
  const PricingModel* model_;
  RandomSource rng_;
  std::map<double, double> cache_;
};

/// CTBR run on the valuation x price product support. The estimator learns
/// the joint distribution of (v, d); with a fixed price that distribution
/// concentrates on one price column. Take/leave is decided by position in
/// the ratio order: positions before the threshold head take, the head
/// position takes with the fractional remainder, later positions leave.
class CtbrPostedPriceBuyer {
 public:
  /// `schedule_exponent` selects a power confidence schedule; a value <= 0
  /// selects the SGD-constant theory schedule instead.
  CtbrPostedPriceBuyer(const PricingModel& model, LearnerConfig learner, double schedule_exponent,
                       RandomSource rng)
      : model_(&model), rng_(std::move(rng)), valuation_sampler_(model.probs()) {
    const std::size_t N = model.num_valuations();
    const std::size_t M = model.num_prices();
    std::vector<std::size_t> order(N * M);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto v_of = [&](std::size_t i) { return model.valuations()[i / M]; };
    auto d_of = [&](std::size_t i) { return model.prices()[i % M]; };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double ra = v_of(a) / d_of(a);
      const double rb = v_of(b) / d_of(b);
      if (ra != rb) return ra > rb;
      return d_of(a) < d_of(b);
    });
    position_.assign(N * M, 0);
    std::vector<ArrivalType> support;
    support.reserve(N * M);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      position_[order[pos]] = pos;
      support.push_back({v_of(order[pos]), d_of(order[pos])});
    }
    BuyerParams params{0.0, model.gamma(), model.rho()};
    ThresholdInputs in = ThresholdInputs::from(std::span<const ArrivalType>(support), params);
    const ConfidenceSchedule schedule =
        schedule_exponent > 0.0
            ? power_schedule(schedule_exponent, in)
            : ConfidenceSchedule::sgd_constant_theory(learner.horizon, learner.eta);
    estimator_.emplace(std::move(in), learner, schedule);
  }

  const CtbrState& state() const { return estimator_->state(); }

  bool operator()(std::size_t, double d) {
    const std::size_t m = model_->price_index(d);
    if (m == model_->num_prices()) throw InvalidInput("posted price is not in the price list");
    const std::size_t n = valuation_sampler_(rng_);
    const std::size_t pos = position_[n * model_->num_prices() + m];
    const CtbrState& s = estimator_->state();
    const bool upper = rng_.uniform() < s.remainder;
    const bool take = pos < s.head || (upper && pos == s.head);
    estimator_->update(pos);
    return take;
  }

 private:
  const PricingModel* model_;
  RandomSource rng_;
  DiscreteSampler valuation_sampler_;
  std::vector<std::size_t> position_;  // (n, m) -> position in ratio order
  std::optional<CtbrEstimator> estimator_;
};

// ---------------------------------------------------------------------------
// Binary-search exploration/exploitation

enum class PricingPhase : std::uint8_t { kExplore = 0, kExploit = 1 };

struct PricingEpisode {
  std::size_t price_index = 0;  // 1-based
  std::size_t start = 0;        // 0-based first period
  std::size_t length = 0;
  double revenue_estimate = 0.0;  // (D / E) sum z
};

struct PricingRun {
  std::vector<double> prices;
  std::vector<std::uint8_t> takes;
  std::vector<PricingPhase> phases;
  std::vector<PricingEpisode> episodes;  // exploration episodes in order
  std::size_t best_index = 0;            // m*, 1-based
  std::size_t iterations = 0;            // binary-search loop iterations
  double revenue = 0.0;                  // sum d z
  double exploit_revenue = 0.0;
  std::size_t exploit_periods = 0;

  std::size_t horizon() const { return prices.size(); }
  double exploit_mean_revenue() const {
    return exploit_periods == 0 ? 0.0 : exploit_revenue / static_cast<double>(exploit_periods);
  }
};

/// E = T^{2/3 + eps}, eps = 1 / ln T by default.
inline std::size_t default_episode_length(std::size_t horizon, double eps = -1.0) {
  const double T = static_cast<double>(horizon);
  if (horizon < 3) throw InvalidInput("horizon too short for the default episode length");
  if (eps < 0.0) eps = 1.0 / std::log(T);
  return static_cast<std::size_t>(std::floor(std::pow(T, 2.0 / 3.0 + eps)));
}

inline std::size_t max_exploration_episodes(std::size_t num_prices) {
  return 2 * (static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(num_prices)))) + 1);
}

template <PostedPriceBuyer Buyer>
PricingRun binary_search_pricing(const std::vector<double>& prices, Buyer& buyer,
                                 std::size_t episode_length, std::size_t horizon) {
  const std::size_t M = prices.size();
  if (M == 0) throw InvalidInput("empty price list");
  if (episode_length < 1) throw InvalidInput("episode length must be at least 1");
  if (horizon < episode_length * max_exploration_episodes(M)) {
    throw InvalidInput("horizon too short for the exploration phase");
  }
  PricingRun run;
  run.prices.reserve(horizon);
  run.takes.reserve(horizon);
  run.phases.reserve(horizon);
  std::vector<std::optional<double>> recorded(M + 1);

  auto play = [&](double d, PricingPhase phase) {
    const std::size_t t = run.prices.size() + 1;
    const bool z = buyer(t, d);
    run.prices.push_back(d);
    run.takes.push_back(z ? 1 : 0);
    run.phases.push_back(phase);
    if (z) run.revenue += d;
    return z;
  };
  auto explore = [&](std::size_t m) {
    if (recorded[m]) return;
    PricingEpisode ep;
    ep.price_index = m;
    ep.start = run.prices.size();
    ep.length = episode_length;
    const double d = prices[m - 1];
    std::size_t takes = 0;
    for (std::size_t i = 0; i < episode_length; ++i) takes += play(d, PricingPhase::kExplore);
    ep.revenue_estimate = d * static_cast<double>(takes) / static_cast<double>(episode_length);
    recorded[m] = ep.revenue_estimate;
    run.episodes.push_back(ep);
  };
  // Ties keep the incumbent.
  auto better = [&](std::size_t incumbent, std::size_t challenger) {
    return *recorded[challenger] > *recorded[incumbent] ? challenger : incumbent;
  };

  explore(1);
  explore(M);
  std::size_t best = better(1, M);
  std::size_t lo = 1, hi = M;
  std::size_t med = (lo + hi) / 2;
  while (lo < hi) {
    ++run.iterations;
    explore(med);
    explore(med + 1);
    if (*recorded[med] < *recorded[med + 1]) {
      best = better(best, med + 1);
      lo = med + 1;
    } else {
      best = better(best, med);
      hi = med - 1;  // med >= lo >= 1
    }
    med = (lo + hi) / 2;
  }
  run.best_index = best;

  const double d_best = prices[best - 1];
  while (run.prices.size() < horizon) {
    if (play(d_best, PricingPhase::kExploit)) run.exploit_revenue += d_best;
    ++run.exploit_periods;
  }
  return run;
}

template <PostedPriceBuyer Buyer>
PricingRun binary_search_pricing(const PricingModel& model, Buyer& buyer,
                                 std::size_t episode_length, std::size_t horizon) {
  return binary_search_pricing(model.prices(), buyer, episode_length, horizon);
}

/// T max_d pi(d) - sum_t d_t z_t.
inline double seller_regret(const PricingModel& model, std::span<const double> prices,
                            std::span<const std::uint8_t> takes) {
  if (prices.size() != takes.size()) throw InvalidInput("price and take traces differ in length");
  double collected = 0.0;
  for (std::size_t t = 0; t < prices.size(); ++t) {
    if (takes[t]) collected += prices[t];
  }
  return static_cast<double>(prices.size()) * max_revenue(model) - collected;
}

inline double seller_regret(const PricingModel& model, const PricingRun& run) {
  return seller_regret(model, run.prices, run.takes);
}

/// |mean(z) - pi(D)/D| for each exploration episode.
inline std::vector<double> episode_deviations(const PricingModel& model, const PricingRun& run) {
  std::vector<double> out;
  out.reserve(run.episodes.size());
  for (const auto& ep : run.episodes) {
    const double d = model.prices()[ep.price_index - 1];
    const double target = take_probability(model, u_of_d(model, d));
    double takes = 0.0;
    for (std::size_t t = ep.start; t < ep.start + ep.length; ++t) takes += run.takes[t];
    out.push_back(std::abs(takes / static_cast<double>(ep.length) - target));
  }
  return out;
}

}  // namespace bidlab
