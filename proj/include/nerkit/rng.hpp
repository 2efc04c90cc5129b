// Copyright 2026 The nerkit Authors
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

#ifndef NERKIT_RNG_HPP_
#define NERKIT_RNG_HPP_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace nerkit {

// SplitMix64 mixing step.
std::uint64_t splitmix64(std::uint64_t x);

// Seed for an independent substream. Every component that needs its own
// RNG (per epoch, per sentence, per batch) derives it from one base seed
// so results stay reproducible and order-independent.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Deterministic RNG with fully specified draw algorithms. The mt19937_64
// engine is bit-exact across platforms by the standard; the helpers below
// avoid std::uniform_*_distribution, whose outputs are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Uniform in [0, n), rejection-sampled so there is no modulo bias.
  std::size_t next_below(std::size_t n);

  bool next_bernoulli(double p) { return next_double() < p; }

  // Fisher-Yates; depends only on the seed and v.size().
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[next_below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nerkit

#endif  // NERKIT_RNG_HPP_
