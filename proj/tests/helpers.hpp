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

#ifndef QREM_TESTS_HELPERS_HPP
#define QREM_TESTS_HELPERS_HPP

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrem/distribution.hpp"
#include "qrem/noise_model.hpp"
#include "qrem/rng.hpp"

namespace qrem::test {

inline double l1_distance(const SparseDistribution &a, const SparseDistribution &b) {
  double total = 0.0;
  std::set<Bitstring> keys;
  for (const auto &[bits, w] : a.weights()) {
    keys.insert(bits);
  }
  for (const auto &[bits, w] : b.weights()) {
    keys.insert(bits);
  }
  for (const auto &bits : keys) {
    total += std::abs(a.weight(bits) - b.weight(bits));
  }
  return total;
}

/// Uniformly random point of the full 2^n simplex (normalized exponentials).
inline SparseDistribution random_simplex_dist(std::size_t n, Rng &rng) {
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> values(dim);
  double total = 0.0;
  for (auto &v : values) {
    v = -std::log(1.0 - rng.next_double());
    total += v;
  }
  std::map<Bitstring, double> weights;
  for (std::size_t i = 0; i < dim; ++i) {
    weights.emplace(Bitstring::from_index(i, n), values[i] / total);
  }
  return SparseDistribution::probability(n, std::move(weights));
}

/// Random distribution supported on at most `support` strings.
inline SparseDistribution random_sparse_dist(std::size_t n, std::size_t support, Rng &rng) {
  if (n < 63) {
    support = std::min<std::size_t>(support, std::size_t{1} << n);
  }
  std::map<Bitstring, double> weights;
  double total = 0.0;
  while (weights.size() < support) {
    Bitstring b(n);
    for (std::size_t k = 0; k < n; ++k) {
      b.set_bit(k, static_cast<int>(rng.next_u64() & 1u));
    }
    const double w = 0.05 + rng.next_double();
    if (weights.emplace(b, w).second) {
      total += w;
    }
  }
  for (auto &[bits, w] : weights) {
    w /= total;
  }
  return SparseDistribution::probability(n, std::move(weights));
}

inline ProductChannel random_channel(std::size_t n, double rate_low, double rate_high, Rng &rng) {
  std::vector<QubitChannel> qubits;
  qubits.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    qubits.push_back(QubitChannel{rng.next_in(rate_low, rate_high),
                                  rng.next_in(rate_low, rate_high)});
  }
  return ProductChannel::from_rates(std::move(qubits));
}

/// Explicit 2^n x 2^n matrix with entries R(s|xi), row s, column xi.
inline std::vector<std::vector<double>> explicit_channel_matrix(const ProductChannel &ch) {
  const std::size_t n = ch.qubit_count();
  const std::size_t dim = std::size_t{1} << n;
  std::vector<std::vector<double>> matrix(dim, std::vector<double>(dim));
  for (std::size_t s = 0; s < dim; ++s) {
    for (std::size_t xi = 0; xi < dim; ++xi) {
      matrix[s][xi] =
          channel_entry(ch, Bitstring::from_index(s, n), Bitstring::from_index(xi, n));
    }
  }
  return matrix;
}

/// Dense Gaussian elimination with partial pivoting; independent check for
/// the Kronecker-structured inversion.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t dim = a.size();
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < dim; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) {
        pivot = row;
      }
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    if (a[col][col] == 0.0) {
      throw std::runtime_error("singular matrix in test solver");
    }
    for (std::size_t row = col + 1; row < dim; ++row) {
      const double factor = a[row][col] / a[col][col];
      for (std::size_t k = col; k < dim; ++k) {
        a[row][k] -= factor * a[col][k];
      }
      b[row] -= factor * b[col];
    }
  }
  std::vector<double> x(dim);
  for (std::size_t row = dim; row-- > 0;) {
    double acc = b[row];
    for (std::size_t k = row + 1; k < dim; ++k) {
      acc -= a[row][k] * x[k];
    }
    x[row] = acc / a[row][row];
  }
  return x;
}

/// Per-test scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string &name) {
  const std::filesystem::path dir = std::filesystem::current_path() / "test_scratch" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace qrem::test

#endif
