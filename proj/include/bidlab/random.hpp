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

// Seeded random streams. Only the engine comes from <random>; the
// real-valued draws are done by hand so sequences are identical across
// standard library implementations.

#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include "bidlab/core.hpp"

namespace bidlab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Folds a list of labels (instance, seed, purpose, ...) into a stream id.
inline std::uint64_t stream_id(std::initializer_list<std::uint64_t> labels) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t l : labels) h = splitmix64(h ^ splitmix64(l));
  return h;
}

class RandomSource {
 public:
  RandomSource(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

/// Inverse-CDF sampler over a finite distribution.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> probs) : cdf_(probs.size()) {
    if (probs.empty()) throw InvalidInput("cannot sample from an empty distribution");
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      cdf_[i] = acc;
    }
    for (double& c : cdf_) c /= acc;
    cdf_.back() = 1.0;
  }

  std::size_t operator()(RandomSource& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    auto idx = static_cast<std::size_t>(it - cdf_.begin());
    // Zero-probability trailing types share the final cdf value; never pick them.
    return std::min(idx, cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

/// T i.i.d. arrival-type indices from the market distribution.
inline std::vector<std::size_t> draw_arrivals(const MarketModel& market, std::size_t horizon,
                                              RandomSource& rng) {
  DiscreteSampler sampler(market.probs());
  std::vector<std::size_t> types(horizon);
  for (auto& k : types) k = sampler(rng);
  return types;
}

}  // namespace bidlab
