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

#ifndef QREM_DISTRIBUTION_HPP
#define QREM_DISTRIBUTION_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qrem/bitstring.hpp"
#include "qrem/errors.hpp"

namespace qrem {

/// Largest qubit count for which dense 2^n vectors may be materialized.
inline constexpr std::size_t kDefaultDenseLimit = 24;

/// Tolerance on the total weight of a stored distribution.
inline constexpr double kNormalizationTol = 1e-9;

/// probability: nonnegative weights summing to one.
/// quasi: real weights summing to one, sign unconstrained (exact matrix
/// inversion of noisy data routinely produces negative entries).
enum class NormalizationMode { probability, quasi };

/// Ordered list of M observed bitstrings, all of the same length n.
struct ShotRecord {
  std::size_t n = 0;
  std::vector<Bitstring> shots;

  static ShotRecord from_shots(std::size_t n, std::vector<Bitstring> shots) {
    if (shots.empty()) {
      throw std::invalid_argument("ShotRecord requires at least one shot");
    }
    for (const auto &shot : shots) {
      if (shot.size() != n) {
        throw std::invalid_argument("shot length does not match qubit count");
      }
    }
    return ShotRecord{n, std::move(shots)};
  }

  std::size_t shot_count() const { return shots.size(); }
};

/// Weights over bitstrings stored only on their support. Keys are kept in
/// lexicographic (text) order, which makes every iteration deterministic.
class SparseDistribution {
 public:
  SparseDistribution() = default;

  static SparseDistribution probability(std::size_t n, std::map<Bitstring, double> weights) {
    return make(n, NormalizationMode::probability, std::move(weights));
  }

  static SparseDistribution quasi(std::size_t n, std::map<Bitstring, double> weights) {
    return make(n, NormalizationMode::quasi, std::move(weights));
  }

  static SparseDistribution point_mass(const Bitstring &b) {
    std::map<Bitstring, double> weights;
    weights[b] = 1.0;
    return probability(b.size(), std::move(weights));
  }

  std::size_t qubit_count() const { return n_; }
  NormalizationMode mode() const { return mode_; }
  const std::map<Bitstring, double> &weights() const { return weights_; }
  std::size_t support_size() const { return weights_.size(); }

  /// Weight of a bitstring, zero if off-support.
  double weight(const Bitstring &b) const {
    auto it = weights_.find(b);
    return it == weights_.end() ? 0.0 : it->second;
  }

  double total_weight() const {
    double total = 0.0;
    for (const auto &[bits, w] : weights_) {
      total += w;
    }
    return total;
  }

  double min_weight() const {
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto &[bits, w] : weights_) {
      lowest = std::min(lowest, w);
    }
    return lowest;
  }

  /// Dense vector indexed by Bitstring::to_index (text read as a binary
  /// number). Only available up to the dense limit.
  std::vector<double> to_dense(std::size_t dense_limit = kDefaultDenseLimit) const {
    if (n_ == 0 || n_ > dense_limit) {
      throw std::invalid_argument("qubit count " + std::to_string(n_) +
                                  " exceeds dense limit " + std::to_string(dense_limit));
    }
    std::vector<double> dense(std::size_t{1} << n_, 0.0);
    for (const auto &[bits, w] : weights_) {
      dense[bits.to_index()] = w;
    }
    return dense;
  }

  static SparseDistribution from_dense(std::size_t n, const std::vector<double> &dense,
                                       NormalizationMode mode) {
    std::map<Bitstring, double> weights;
    for (std::size_t i = 0; i < dense.size(); ++i) {
      if (dense[i] != 0.0) {
        weights.emplace(Bitstring::from_index(i, n), dense[i]);
      }
    }
    return make(n, mode, std::move(weights));
  }

  bool operator==(const SparseDistribution &other) const = default;

 private:
  static SparseDistribution make(std::size_t n, NormalizationMode mode,
                                 std::map<Bitstring, double> weights) {
    double total = 0.0;
    for (auto it = weights.begin(); it != weights.end();) {
      if (it->first.size() != n) {
        throw std::invalid_argument("bitstring length does not match qubit count");
      }
      if (mode == NormalizationMode::probability && it->second < 0.0) {
        throw std::invalid_argument("probability-mode weight is negative");
      }
      if (it->second == 0.0) {
        it = weights.erase(it);  // support-only storage
      } else {
        total += it->second;
        ++it;
      }
    }
    if (std::abs(total - 1.0) > kNormalizationTol) {
      throw std::invalid_argument("weights sum to " + std::to_string(total) + ", expected 1");
    }
    SparseDistribution dist;
    dist.n_ = n;
    dist.mode_ = mode;
    dist.weights_ = std::move(weights);
    return dist;
  }

  std::size_t n_ = 0;
  NormalizationMode mode_ = NormalizationMode::probability;
  std::map<Bitstring, double> weights_;
};

/// Relative frequency of each observed bitstring: weight = count / M.
inline SparseDistribution empirical_distribution(const ShotRecord &record) {
  std::map<Bitstring, std::uint64_t> counts;
  for (const auto &shot : record.shots) {
    ++counts[shot];
  }
  const double m = static_cast<double>(record.shot_count());
  std::map<Bitstring, double> weights;
  for (const auto &[bits, count] : counts) {
    weights.emplace(bits, static_cast<double>(count) / m);
  }
  return SparseDistribution::probability(record.n, std::move(weights));
}

/// Sums weights over all full-length strings agreeing on the subset bits.
/// Linear and total-weight preserving; keeps the normalization mode.
inline SparseDistribution marginalize(const SparseDistribution &dist, const BitSubset &subset) {
  subset.validate_for(dist.qubit_count());
  std::map<Bitstring, double> reduced;
  for (const auto &[bits, w] : dist.weights()) {
    reduced[bits.select(subset)] += w;
  }
  return dist.mode() == NormalizationMode::probability
             ? SparseDistribution::probability(subset.size(), std::move(reduced))
             : SparseDistribution::quasi(subset.size(), std::move(reduced));
}

/// Empirical distribution of the subset bits, computed directly from the
/// record. Equal to marginalize(empirical_distribution(record), subset).
inline SparseDistribution empirical_marginal(const ShotRecord &record, const BitSubset &subset) {
  subset.validate_for(record.n);
  std::map<Bitstring, std::uint64_t> counts;
  for (const auto &shot : record.shots) {
    ++counts[shot.select(subset)];
  }
  const double m = static_cast<double>(record.shot_count());
  std::map<Bitstring, double> weights;
  for (const auto &[bits, count] : counts) {
    weights.emplace(bits, static_cast<double>(count) / m);
  }
  return SparseDistribution::probability(subset.size(), std::move(weights));
}

/// Kullback-Leibler divergence sum_x p(x) ln(p(x)/q(x)) with 0 ln 0 := 0.
/// Returns +infinity when q vanishes somewhere on p's support.
inline double relative_entropy(const SparseDistribution &p, const SparseDistribution &q) {
  if (p.qubit_count() != q.qubit_count()) {
    throw std::invalid_argument("relative_entropy requires equal qubit counts");
  }
  if (p.mode() != NormalizationMode::probability || q.mode() != NormalizationMode::probability) {
    throw std::invalid_argument("relative_entropy requires probability-mode inputs");
  }
  double sum = 0.0;
  for (const auto &[bits, pw] : p.weights()) {
    const double qw = q.weight(bits);
    if (qw <= 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    sum += pw * std::log(pw / qw);
  }
  return std::max(sum, 0.0);
}

/// Combined weight of the all-zeros and all-ones strings.
inline double global_correlation(const SparseDistribution &dist) {
  const std::size_t n = dist.qubit_count();
  return dist.weight(Bitstring::zeros(n)) + dist.weight(Bitstring::ones(n));
}

/// Global correlation of the marginal over the subset bits.
inline double local_correlation(const SparseDistribution &dist, const BitSubset &subset) {
  return global_correlation(marginalize(dist, subset));
}

}  // namespace qrem

#endif
