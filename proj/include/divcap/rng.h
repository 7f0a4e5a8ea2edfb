//
// Copyright 2026 The divcap Authors
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

#ifndef DIVCAP_RNG_H_
#define DIVCAP_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace divcap {

// Seeded generator with distributions implemented here rather than taken from
// <random>, whose distribution algorithms are implementation-defined. Golden
// files and cross-platform reruns depend on the exact draw sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }

  // Uniform over [0, n). n must be positive.
  std::uint64_t UniformIndex(std::uint64_t n);

  // Uniform over [lo, hi] inclusive.
  std::uint64_t UniformRange(std::uint64_t lo, std::uint64_t hi) {
    return lo + UniformIndex(hi - lo + 1);
  }

  // Uniform over [0, 1) with 53 random bits.
  double UniformDouble();

  // Standard normal via Box-Muller.
  double Normal();

  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = UniformIndex(i);
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t SplitMix64(std::uint64_t x);

// Derives an independent stream seed from a base seed and a label, so that
// per-item randomness does not depend on processing order.
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view label);

}  // namespace divcap

#endif  // DIVCAP_RNG_H_
