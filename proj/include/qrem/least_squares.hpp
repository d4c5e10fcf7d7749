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

#ifndef QREM_LEAST_SQUARES_HPP
#define QREM_LEAST_SQUARES_HPP

#include <cstddef>
#include <map>
#include <string>

#include "qrem/distribution.hpp"
#include "qrem/noise_model.hpp"

namespace qrem {

/// Marginal mitigation is limited to subgroups this large (dense 2^l work).
inline constexpr std::size_t kMaxMarginalBits = 20;

/// Quasi-weights at or above -1e-12 everywhere are flagged as nonnegative.
inline constexpr double kNonnegativeSlack = 1e-12;

/// Least-squares mitigation output. Since the channel matrix is invertible
/// away from per-qubit rate sum 1, minimizing the sum of squared residuals
/// coincides with applying the inverse matrix, which is what runs here.
struct LsqResult {
  SparseDistribution q;   ///< quasi mode; negative entries are possible
  bool nonnegative = false;
};

inline LsqResult mitigate_full_lsq(const SparseDistribution &p, const ProductChannel &ch,
                                   std::size_t dense_limit = kDefaultDenseLimit) {
  SparseDistribution q = apply_inverse(ch, p, dense_limit);
  return LsqResult{q, q.min_weight() >= -kNonnegativeSlack};
}

/// Full-mode inversion of the l-bit empirical marginal with the channel
/// restricted to the subset qubits.
inline LsqResult mitigate_marginal_lsq(const ShotRecord &record, const ProductChannel &ch,
                                       const BitSubset &subset) {
  if (record.n != ch.qubit_count()) {
    throw std::invalid_argument("record and channel qubit counts differ");
  }
  if (subset.size() > kMaxMarginalBits) {
    throw std::invalid_argument("subset size exceeds marginal limit " +
                                std::to_string(kMaxMarginalBits));
  }
  return mitigate_full_lsq(empirical_marginal(record, subset), ch.restricted(subset),
                           kMaxMarginalBits);
}

/// Optional post-step, not part of the inversion itself: clips negative
/// quasi-weights to zero and renormalizes onto the simplex.
inline SparseDistribution clip_to_simplex(const SparseDistribution &dist) {
  double positive_total = 0.0;
  for (const auto &[bits, w] : dist.weights()) {
    if (w > 0.0) {
      positive_total += w;
    }
  }
  if (positive_total <= 0.0) {
    throw std::invalid_argument("no positive weight to renormalize");
  }
  std::map<Bitstring, double> clipped;
  for (const auto &[bits, w] : dist.weights()) {
    if (w > 0.0) {
      clipped.emplace(bits, w / positive_total);
    }
  }
  return SparseDistribution::probability(dist.qubit_count(), std::move(clipped));
}

}  // namespace qrem

#endif
