//
// Copyright 2026 the nicom authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "nicom/errors.hpp"
#include "nicom/rational.hpp"

namespace nicom {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic, replication-local random stream. std::mt19937_64 has a fully
// specified algorithm, and the unit-interval conversion below avoids
// std::uniform_real_distribution (whose output is implementation-defined), so
// identical (master seed, stream) pairs produce identical draw sequences on
// every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng derive(std::uint64_t master_seed, std::uint64_t stream) {
    return Rng(splitmix64(splitmix64(master_seed) ^
                          (0x9e3779b97f4a7c15ULL * (stream + 1))));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits; always a dyadic rational.
  double next_unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Inverse-CDF sampling over float weights in index order; ties in the
  // cumulative sums resolve toward the lower index.
  int sample_weights(std::span<const double> weights) {
    if (weights.empty()) throw InvalidArgumentError("empty weight vector");
    const double u = next_unit();
    double cum = 0.0;
    int last_positive = 0;
    for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
      cum += weights[i];
      if (weights[i] > 0.0) last_positive = i;
      if (u < cum) return i;
    }
    // Float dust can leave cum slightly below 1; fall back to the last
    // positive-weight index.
    return last_positive;
  }

  // Inverse-CDF sampling over exact rational probabilities. The uniform draw
  // is a dyadic rational, so the comparison against the cumulative sums is
  // exact.
  int sample_rational(std::span<const Rational> probs) {
    if (probs.empty()) throw InvalidArgumentError("empty support");
    const Rational u = rational_from_double(next_unit());
    Rational cum(0);
    for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
      cum += probs[i];
      if (u < cum) return i;
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nicom
