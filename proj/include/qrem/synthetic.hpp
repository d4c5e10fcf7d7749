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

#ifndef QREM_SYNTHETIC_HPP
#define QREM_SYNTHETIC_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "qrem/distribution.hpp"
#include "qrem/noise_model.hpp"
#include "qrem/rng.hpp"

namespace qrem {

/// Ideal GHZ-style truth: all mass on the all-zeros and all-ones strings.
inline SparseDistribution make_ghz_truth(std::size_t n, double weight_zero) {
  if (n < 1) {
    throw std::invalid_argument("qubit count must be positive");
  }
  if (!(weight_zero >= 0.0 && weight_zero <= 1.0)) {
    throw std::invalid_argument("weight must lie in [0, 1]");
  }
  std::map<Bitstring, double> weights;
  weights[Bitstring::zeros(n)] = weight_zero;
  weights[Bitstring::ones(n)] = 1.0 - weight_zero;
  return SparseDistribution::probability(n, std::move(weights));
}

/// Device-like calibration stand-in: every qubit gets independent flip
/// rates drawn uniformly from [rate_low, rate_high].
inline ProductChannel make_device_profile(std::size_t n, double rate_low, double rate_high,
                                          std::uint64_t seed) {
  if (n < 1) {
    throw std::invalid_argument("qubit count must be positive");
  }
  if (!(rate_low >= 0.0 && rate_low <= rate_high && rate_high < 0.5)) {
    throw std::invalid_argument("rates must satisfy 0 <= low <= high < 0.5");
  }
  Rng rng(seed);
  std::vector<QubitChannel> qubits;
  qubits.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double r10 = rng.next_in(rate_low, rate_high);
    const double r01 = rng.next_in(rate_low, rate_high);
    qubits.push_back(QubitChannel{r10, r01});
  }
  return ProductChannel::from_rates(std::move(qubits));
}

}  // namespace qrem

#endif
