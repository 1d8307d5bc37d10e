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

// Repeated second-price auction loop shared by every bidder.

#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "bidlab/core.hpp"
#include "bidlab/random.hpp"

namespace bidlab {

/// A bid value, or the sentinel that beats every competing bid.
class Bid {
 public:
  constexpr Bid() = default;
  constexpr explicit Bid(double value) : value_(value) {}
  static constexpr Bid always_win() {
    Bid b;
    b.always_ = true;
    b.value_ = std::numeric_limits<double>::infinity();
    return b;
  }

  constexpr bool is_always_win() const { return always_; }
  constexpr double value() const { return value_; }

  /// Ties win. The relative slack absorbs rounding in v / (v^k / d^k) versus
  /// d^k; support ratios are at least 1e-9 apart, so it never flips a real
  /// comparison.
  constexpr bool beats(double cost) const {
    return always_ || value_ >= cost * (1.0 - kTieTol);
  }

  static constexpr double kTieTol = 1e-10;

 private:
  double value_ = 0.0;
  bool always_ = false;
};

struct Observation {
  std::size_t type = 0;
  double value = 0.0;
  double cost = 0.0;
  bool win = false;
};

template <class B>
concept Bidder = requires(B b, double v, RandomSource& rng, const Observation& obs) {
  { b.bid(v, rng) } -> std::convertible_to<Bid>;
  b.observe(obs);
};

struct SimOptions {
  // Refuse any win whose payment would push total spend above rho * T.
  bool hard_budget_stop = false;
};

/// Per-period outcomes of one run over a fixed arrival stream.
struct RunRecord {
  std::vector<std::size_t> types;
  std::vector<double> bids;  // +inf encodes the always-win sentinel
  std::vector<std::uint8_t> wins;
  double utility = 0.0;      // sum (v - alpha d) z
  double spend = 0.0;        // sum d z
  double value = 0.0;        // sum v z
  double roi_balance = 0.0;  // sum (v - gamma d) z
  double budget = 0.0;       // rho T

  std::size_t horizon() const { return types.size(); }
  bool roi_satisfied() const { return roi_balance >= -1e-9 * (1.0 + spend); }
  bool budget_satisfied() const { return spend <= budget * (1.0 + 1e-12); }
};

template <Bidder B>
RunRecord simulate(B& bidder, const MarketModel& market, const BuyerParams& params,
                   std::span<const std::size_t> types, RandomSource& rng,
                   SimOptions options = {}) {
  RunRecord rec;
  const std::size_t T = types.size();
  rec.types.assign(types.begin(), types.end());
  rec.bids.resize(T);
  rec.wins.resize(T);
  rec.budget = params.rho * static_cast<double>(T);
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t k = types[t];
    const double v = market.value(k);
    const double d = market.cost(k);
    const Bid b = bidder.bid(v, rng);
    bool win = b.beats(d);
    if (win && options.hard_budget_stop && rec.spend + d > rec.budget) win = false;
    rec.bids[t] = b.value();
    rec.wins[t] = win ? 1 : 0;
    if (win) {
      rec.utility += v - params.alpha * d;
      rec.spend += d;
      rec.value += v;
      rec.roi_balance += v - params.gamma * d;
    }
    bidder.observe(Observation{k, v, d, win});
  }
  return rec;
}

/// Bids zero every period; regret equals OPT.
struct NeverBidder {
  Bid bid(double, RandomSource&) { return Bid(0.0); }
  void observe(const Observation&) {}
};

}  // namespace bidlab
