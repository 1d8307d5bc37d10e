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

// Domain types shared by every module: arrival supports sorted by
// value-to-cost ratio, buyer parameters and threshold vectors.
//
// Indexing convention: arrival types are stored 0-based, but every "head"
// or "threshold type" below counts types, so head J means "the first J types
// are won outright". Type K+1 (ratio 0, infinite cost) is never stored.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bidlab {

/// Thrown on any precondition violation in user-facing input.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kNormalizationTol = 1e-12;
inline constexpr double kInputTol = 1e-9;

struct ArrivalType {
  double value = 0.0;
  double cost = 0.0;

  double ratio() const { return value / cost; }
};

struct BuyerParams {
  double alpha = 0.0;  // capital cost
  double gamma = 1.0;  // target ROI
  double rho = 1.0;    // per-period budget

  void validate() const {
    if (!(alpha >= 0.0)) throw InvalidInput("alpha must be nonnegative");
    if (!(gamma > alpha)) throw InvalidInput("gamma must exceed alpha");
    if (!(rho > 0.0)) throw InvalidInput("rho must be positive");
  }
};

/// Finite support of (value, cost) pairs sorted by strictly decreasing
/// value-to-cost ratio, together with the occurrence distribution.
class MarketModel {
 public:
  MarketModel() = default;

  std::size_t size() const { return arrivals_.size(); }
  const std::vector<ArrivalType>& arrivals() const { return arrivals_; }
  const std::vector<double>& probs() const { return probs_; }
  const ArrivalType& operator[](std::size_t k) const { return arrivals_[k]; }

  double value(std::size_t k) const { return arrivals_[k].value; }
  double cost(std::size_t k) const { return arrivals_[k].cost; }
  double ratio(std::size_t k) const { return arrivals_[k].ratio(); }

  double max_cost() const {
    double m = 0.0;
    for (const auto& a : arrivals_) m = std::max(m, a.cost);
    return m;
  }
  double min_cost() const {
    double m = arrivals_.empty() ? 0.0 : arrivals_.front().cost;
    for (const auto& a : arrivals_) m = std::min(m, a.cost);
    return m;
  }
  /// max_k |v^k - gamma d^k|
  double max_abs_margin(double gamma) const {
    double m = 0.0;
    for (const auto& a : arrivals_) m = std::max(m, std::abs(a.value - gamma * a.cost));
    return m;
  }

  /// Index of the stored type matching (value, cost), or size() if absent.
  std::size_t find(double value, double cost) const {
    for (std::size_t k = 0; k < arrivals_.size(); ++k) {
      const auto& a = arrivals_[k];
      if (std::abs(a.value - value) <= kInputTol * std::max(1.0, std::abs(value)) &&
          std::abs(a.cost - cost) <= kInputTol * std::max(1.0, std::abs(cost))) {
        return k;
      }
    }
    return arrivals_.size();
  }

  /// Same support with a different distribution (validated like make_market).
  MarketModel with_probs(std::vector<double> probs) const;

 private:
  friend MarketModel make_market(std::span<const std::pair<double, double>>,
                                 std::span<const double>);
  std::vector<ArrivalType> arrivals_;
  std::vector<double> probs_;
};

namespace detail {

inline void validate_probs(std::span<const double> probs, std::size_t expected) {
  if (probs.size() != expected) throw InvalidInput("probs length does not match support size");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidInput("probs must be nonnegative and finite");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kInputTol) throw InvalidInput("probs must sum to 1");
}

// Renormalize so the stored sum is within kNormalizationTol of 1.
inline void renormalize(std::vector<double>& probs) {
  const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (double& p : probs) p /= sum;
}

}  // namespace detail

/// Builds a market from raw (value, cost) pairs. Pairs are reordered by
/// decreasing ratio; equal ratios (relative 1e-9) are rejected, since callers
/// are expected to merge them first.
inline MarketModel make_market(std::span<const std::pair<double, double>> pairs,
                               std::span<const double> probs) {
  if (pairs.empty()) throw InvalidInput("market needs at least one arrival type");
  detail::validate_probs(probs, pairs.size());
  for (const auto& [v, d] : pairs) {
    if (!(v > 0.0) || !(d > 0.0) || !std::isfinite(v) || !std::isfinite(d)) {
      throw InvalidInput("values and costs must be strictly positive");
    }
  }
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto ratio = [&](std::size_t i) { return pairs[i].first / pairs[i].second; };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ratio(a) > ratio(b); });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const double hi = ratio(order[i - 1]);
    const double lo = ratio(order[i]);
    if (hi - lo <= kInputTol * hi) {
      throw InvalidInput("duplicate value-to-cost ratio " + std::to_string(lo));
    }
  }
  MarketModel m;
  m.arrivals_.reserve(pairs.size());
  m.probs_.reserve(pairs.size());
  for (std::size_t i : order) {
    m.arrivals_.push_back({pairs[i].first, pairs[i].second});
    m.probs_.push_back(probs[i]);
  }
  detail::renormalize(m.probs_);
  return m;
}

inline MarketModel make_market(const std::vector<std::pair<double, double>>& pairs,
                               const std::vector<double>& probs) {
  return make_market(std::span<const std::pair<double, double>>(pairs),
                     std::span<const double>(probs));
}

inline MarketModel MarketModel::with_probs(std::vector<double> probs) const {
  detail::validate_probs(probs, size());
  MarketModel m = *this;
  m.probs_ = std::move(probs);
  detail::renormalize(m.probs_);
  return m;
}

/// v^k - gamma d^k for the 1-based type k.
inline double roi_margin(const MarketModel& market, const BuyerParams& params, std::size_t k) {
  if (k < 1 || k > market.size()) throw InvalidInput("arrival index out of range");
  return market.value(k - 1) - params.gamma * market.cost(k - 1);
}

/// psi(J, q): J leading ones, then q, then zeros.
class ThresholdVector {
 public:
  ThresholdVector() = default;
  ThresholdVector(std::size_t dim, std::size_t head, double remainder)
      : dim_(dim), head_(head), remainder_(remainder) {
    if (head > dim) throw InvalidInput("threshold head exceeds dimension");
    if (!(remainder >= 0.0) || !(remainder < 1.0)) {
      throw InvalidInput("threshold remainder must lie in [0, 1)");
    }
    if (head == dim && remainder != 0.0) {
      throw InvalidInput("a full threshold vector must have zero remainder");
    }
  }

  std::size_t dim() const { return dim_; }
  std::size_t head() const { return head_; }
  double remainder() const { return remainder_; }

  /// Entry for the 0-based coordinate i.
  double operator[](std::size_t i) const {
    if (i < head_) return 1.0;
    if (i == head_) return remainder_;
    return 0.0;
  }

  friend bool operator==(const ThresholdVector&, const ThresholdVector&) = default;

  /// Elementwise a <= b. Threshold vectors are totally ordered, and the order
  /// is lexicographic in (head, remainder).
  friend bool precedes(const ThresholdVector& a, const ThresholdVector& b) {
    return a.head_ < b.head_ || (a.head_ == b.head_ && a.remainder_ <= b.remainder_);
  }

 private:
  std::size_t dim_ = 0;
  std::size_t head_ = 0;
  double remainder_ = 0.0;
};

inline std::vector<double> tv_expand(const ThresholdVector& tv) {
  std::vector<double> x(tv.dim(), 0.0);
  for (std::size_t i = 0; i < tv.dim(); ++i) x[i] = tv[i];
  return x;
}

inline ThresholdVector tv_min(const ThresholdVector& a, const ThresholdVector& b) {
  if (a.dim() != b.dim()) throw InvalidInput("threshold vector dimension mismatch");
  return precedes(a, b) ? a : b;
}

inline ThresholdVector tv_min(const ThresholdVector& a, const ThresholdVector& b,
                              const ThresholdVector& c) {
  return tv_min(tv_min(a, b), c);
}

}  // namespace bidlab
