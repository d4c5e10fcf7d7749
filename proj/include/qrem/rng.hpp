// Copyright 2026 The qrem Authors
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

#ifndef QREM_RNG_HPP
#define QREM_RNG_HPP

#include <cstdint>
#include <random>

namespace qrem {

/// splitmix64 step, used to decorrelate seeds for independent streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded generator with the sampling helpers used throughout the library.
/// The helpers are hand-rolled (not std::uniform_*_distribution) so that a
/// given seed produces the same stream on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), bound >= 1. Rejection sampling on a
  /// power-of-two mask keeps the draw unbiased.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound <= 1) {
      return 0;
    }
    std::uint64_t mask = ~std::uint64_t{0};
    std::uint64_t limit = bound - 1;
    mask >>= 63 - bit_width_minus_one(limit);
    std::uint64_t value;
    do {
      value = next_u64() & mask;
    } while (value >= bound);
    return value;
  }

  /// Uniform double in [low, high].
  double next_in(double low, double high) { return low + next_double() * (high - low); }

 private:
  static int bit_width_minus_one(std::uint64_t v) {
    int w = 0;
    while (v >>= 1) {
      ++w;
    }
    return w;
  }

  std::mt19937_64 engine_;
};

}  // namespace qrem

#endif
