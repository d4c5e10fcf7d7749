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

#ifndef QREM_NOISE_MODEL_HPP
#define QREM_NOISE_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qrem/bitstring.hpp"
#include "qrem/distribution.hpp"
#include "qrem/errors.hpp"
#include "qrem/rng.hpp"

namespace qrem {

/// Rates are pushed into [eps, 1-eps] wherever a logarithm is taken, so
/// log-likelihoods stay finite even for calibration entries of exactly 0.
inline constexpr double kRateClampEpsilon = 1e-9;

/// A per-qubit 2x2 matrix is treated as singular below this determinant.
inline constexpr double kSingularDeterminantTol = 1e-12;

inline double clamp_rate(double rate) {
  return std::min(std::max(rate, kRateClampEpsilon), 1.0 - kRateClampEpsilon);
}

/// One qubit's readout transition matrix, stored as its two flip rates.
/// As a 2x2 matrix with columns indexed by the ideal bit it is
/// column-stochastic by construction.
struct QubitChannel {
  double r1_given_0 = 0.0;  ///< probability of reading 1 when the ideal bit is 0
  double r0_given_1 = 0.0;  ///< probability of reading 0 when the ideal bit is 1

  double flip_rate(int ideal) const { return ideal == 0 ? r1_given_0 : r0_given_1; }

  /// R(s | ideal) with the stored (unclamped) rates.
  double entry(int s, int ideal) const {
    const double flip = flip_rate(ideal);
    return s == ideal ? 1.0 - flip : flip;
  }

  /// ln R(s | ideal) with clamped rates; always finite.
  double log_entry(int s, int ideal) const {
    const double flip = clamp_rate(flip_rate(ideal));
    return std::log(s == ideal ? 1.0 - flip : flip);
  }

  /// Determinant of the 2x2 matrix; exactly 1 - r1_given_0 - r0_given_1.
  double determinant() const { return 1.0 - r1_given_0 - r0_given_1; }

  bool near_singular() const { return std::abs(determinant()) < kSingularDeterminantTol; }
};

/// Independent readout channel over n qubits: R(s|xi) = prod_k R_k(s_k|xi_k).
class ProductChannel {
 public:
  ProductChannel() = default;

  static ProductChannel noiseless(std::size_t n) {
    ProductChannel ch;
    ch.qubits_.assign(n, QubitChannel{0.0, 0.0});
    return ch;
  }

  static ProductChannel from_rates(std::vector<QubitChannel> qubits) {
    validate(qubits);
    ProductChannel ch;
    ch.qubits_ = std::move(qubits);
    return ch;
  }

  /// Calibration entry point: exact-zero (or exact-one) rates are clamped
  /// into the open interval and the affected qubit indices recorded, so
  /// callers can surface a warning.
  static ProductChannel from_calibration(std::vector<QubitChannel> qubits) {
    validate(qubits);
    ProductChannel ch;
    ch.qubits_ = std::move(qubits);
    for (std::size_t k = 0; k < ch.qubits_.size(); ++k) {
      auto &q = ch.qubits_[k];
      const double c10 = clamp_rate(q.r1_given_0);
      const double c01 = clamp_rate(q.r0_given_1);
      if (c10 != q.r1_given_0 || c01 != q.r0_given_1) {
        ch.clamped_qubits_.push_back(k);
        q.r1_given_0 = c10;
        q.r0_given_1 = c01;
      }
    }
    return ch;
  }

  std::size_t qubit_count() const { return qubits_.size(); }
  const QubitChannel &qubit(std::size_t k) const { return qubits_[k]; }
  const std::vector<QubitChannel> &qubits() const { return qubits_; }

  /// Qubit indices whose calibration rates were clamped on load.
  const std::vector<std::size_t> &clamped_qubits() const { return clamped_qubits_; }

  /// The channel acting on the subset bits only. Valid because the noise
  /// factorizes per qubit, so marginals see exactly the restricted channel.
  ProductChannel restricted(const BitSubset &subset) const {
    subset.validate_for(qubit_count());
    ProductChannel ch;
    ch.qubits_.reserve(subset.size());
    for (std::size_t idx : subset.indices()) {
      ch.qubits_.push_back(qubits_[idx]);
    }
    return ch;
  }

  bool any_near_singular() const {
    return std::any_of(qubits_.begin(), qubits_.end(),
                       [](const QubitChannel &q) { return q.near_singular(); });
  }

 private:
  static void validate(const std::vector<QubitChannel> &qubits) {
    if (qubits.empty()) {
      throw std::invalid_argument("channel requires at least one qubit");
    }
    for (const auto &q : qubits) {
      if (!(q.r1_given_0 >= 0.0 && q.r1_given_0 <= 1.0) ||
          !(q.r0_given_1 >= 0.0 && q.r0_given_1 <= 1.0)) {
        throw std::invalid_argument("flip rates must lie in [0, 1]");
      }
    }
  }

  std::vector<QubitChannel> qubits_;
  std::vector<std::size_t> clamped_qubits_;
};

/// R(s|xi) = prod_k R_k(s_k|xi_k).
inline double channel_entry(const ProductChannel &ch, const Bitstring &s, const Bitstring &xi) {
  if (s.size() != ch.qubit_count() || xi.size() != ch.qubit_count()) {
    throw std::invalid_argument("bitstring length does not match channel qubit count");
  }
  double value = 1.0;
  for (std::size_t k = 0; k < ch.qubit_count(); ++k) {
    value *= ch.qubit(k).entry(s.bit(k), xi.bit(k));
  }
  return value;
}

/// sum_k ln R_k(s_k|xi_k) with clamped rates; finite for all inputs.
inline double log_channel_entry(const ProductChannel &ch, const Bitstring &s,
                                const Bitstring &xi) {
  if (s.size() != ch.qubit_count() || xi.size() != ch.qubit_count()) {
    throw std::invalid_argument("bitstring length does not match channel qubit count");
  }
  double value = 0.0;
  for (std::size_t k = 0; k < ch.qubit_count(); ++k) {
    value += ch.qubit(k).log_entry(s.bit(k), xi.bit(k));
  }
  return value;
}

namespace detail {

/// Applies the 2x2 matrix [[m00, m01], [m10, m11]] along the axis of qubit
/// k of a dense length-2^n vector. Sweeping all qubits applies the full
/// Kronecker-product matrix in O(n 2^n) without materializing it.
inline void apply_qubit_transform(std::vector<double> &v, std::size_t n, std::size_t k,
                                  double m00, double m01, double m10, double m11) {
  const std::size_t stride = std::size_t{1} << (n - 1 - k);
  const std::size_t dim = v.size();
  for (std::size_t block = 0; block < dim; block += 2 * stride) {
    for (std::size_t i = block; i < block + stride; ++i) {
      const double a = v[i];
      const double b = v[i + stride];
      v[i] = m00 * a + m01 * b;
      v[i + stride] = m10 * a + m11 * b;
    }
  }
}

inline void forward_in_place(const ProductChannel &ch, std::vector<double> &v) {
  const std::size_t n = ch.qubit_count();
  for (std::size_t k = 0; k < n; ++k) {
    const auto &q = ch.qubit(k);
    apply_qubit_transform(v, n, k, 1.0 - q.r1_given_0, q.r0_given_1, q.r1_given_0,
                          1.0 - q.r0_given_1);
  }
}

inline void transpose_forward_in_place(const ProductChannel &ch, std::vector<double> &v) {
  const std::size_t n = ch.qubit_count();
  for (std::size_t k = 0; k < n; ++k) {
    const auto &q = ch.qubit(k);
    apply_qubit_transform(v, n, k, 1.0 - q.r1_given_0, q.r1_given_0, q.r0_given_1,
                          1.0 - q.r0_given_1);
  }
}

inline void inverse_in_place(const ProductChannel &ch, std::vector<double> &v) {
  const std::size_t n = ch.qubit_count();
  for (std::size_t k = 0; k < n; ++k) {
    const auto &q = ch.qubit(k);
    if (q.near_singular()) {
      throw SingularChannelError("qubit " + std::to_string(k) +
                                 " has rate sum 1 within tolerance; its 2x2 matrix is singular");
    }
    const double det = q.determinant();
    apply_qubit_transform(v, n, k, (1.0 - q.r0_given_1) / det, -q.r0_given_1 / det,
                          -q.r1_given_0 / det, (1.0 - q.r1_given_0) / det);
  }
}

inline void require_dense(const ProductChannel &ch, const SparseDistribution &dist,
                          std::size_t dense_limit) {
  if (dist.qubit_count() != ch.qubit_count()) {
    throw std::invalid_argument("distribution and channel qubit counts differ");
  }
  if (ch.qubit_count() > dense_limit) {
    throw std::invalid_argument("qubit count " + std::to_string(ch.qubit_count()) +
                                " exceeds dense limit " + std::to_string(dense_limit) +
                                "; use marginal (local) operations instead");
  }
}

}  // namespace detail

/// The image R q. Preserves the normalization mode and the total weight.
inline SparseDistribution apply_forward(const ProductChannel &ch, const SparseDistribution &q,
                                        std::size_t dense_limit = kDefaultDenseLimit) {
  detail::require_dense(ch, q, dense_limit);
  std::vector<double> dense = q.to_dense(dense_limit);
  detail::forward_in_place(ch, dense);
  return SparseDistribution::from_dense(q.qubit_count(), dense, q.mode());
}

/// The exact preimage R^-1 p, always reported as a quasi-distribution:
/// for sampled p it routinely contains negative entries.
inline SparseDistribution apply_inverse(const ProductChannel &ch, const SparseDistribution &p,
                                        std::size_t dense_limit = kDefaultDenseLimit) {
  detail::require_dense(ch, p, dense_limit);
  std::vector<double> dense = p.to_dense(dense_limit);
  detail::inverse_in_place(ch, dense);
  return SparseDistribution::from_dense(p.qubit_count(), dense, NormalizationMode::quasi);
}

/// Draws m shots: ideal bitstring from q, then each bit flipped with its
/// qubit's rate. One fresh generator per call; identical seeds give
/// identical records.
inline ShotRecord sample_noisy_shots(const ProductChannel &ch, const SparseDistribution &q,
                                     std::size_t m, std::uint64_t seed) {
  if (q.mode() != NormalizationMode::probability) {
    throw std::invalid_argument("sampling requires a probability-mode distribution");
  }
  if (q.qubit_count() != ch.qubit_count()) {
    throw std::invalid_argument("distribution and channel qubit counts differ");
  }
  if (m == 0) {
    throw std::invalid_argument("shot count must be positive");
  }
  std::vector<Bitstring> support;
  std::vector<double> cumulative;
  support.reserve(q.support_size());
  cumulative.reserve(q.support_size());
  double running = 0.0;
  for (const auto &[bits, w] : q.weights()) {
    running += w;
    support.push_back(bits);
    cumulative.push_back(running);
  }
  const std::size_t n = ch.qubit_count();
  Rng rng(seed);
  std::vector<Bitstring> shots;
  shots.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double u = rng.next_double() * running;
    std::size_t lo = 0;
    std::size_t hi = cumulative.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cumulative[mid] <= u) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    Bitstring shot = support[lo];
    for (std::size_t k = 0; k < n; ++k) {
      const double rate = ch.qubit(k).flip_rate(shot.bit(k));
      if (rng.next_double() < rate) {
        shot.flip_bit(k);
      }
    }
    shots.push_back(std::move(shot));
  }
  return ShotRecord{n, std::move(shots)};
}

/// Builds the channel from calibration rates; alias for the clamping entry
/// point so call sites read like the data flow.
inline ProductChannel load_calibration(std::vector<QubitChannel> qubits) {
  return ProductChannel::from_calibration(std::move(qubits));
}

}  // namespace qrem

#endif
