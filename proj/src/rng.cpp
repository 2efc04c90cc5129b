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

#include "nerkit/rng.hpp"

#include <limits>
#include <stdexcept>

namespace nerkit {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(splitmix64(base) ^ (stream + 0x9e3779b97f4a7c15ULL));
}

std::size_t Rng::next_below(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("Rng::next_below: n must be >= 1");
  }
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  // 2^64 mod bound; draws above kMax - rem would bias the remainder.
  const std::uint64_t rem = (kMax % bound + 1) % bound;
  std::uint64_t x = engine_();
  while (rem != 0 && x > kMax - rem) {
    x = engine_();
  }
  return static_cast<std::size_t>(x % bound);
}

}  // namespace nerkit
