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

#ifndef QREM_ORACLES_HPP
#define QREM_ORACLES_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "qrem/distribution.hpp"
#include "qrem/mixture.hpp"
#include "qrem/noise_model.hpp"

namespace qrem {

// Exhaustive reference solvers for tiny instances. They validate the
// iterative mitigators, so they deliberately share nothing with them
// beyond the data types and channel_entry: objectives are evaluated
// directly from the defining sums.

struct LreOracleResult {
  SparseDistribution q;
  double objective = std::numeric_limits<double>::infinity();
};

struct MixtureOracleResult {
  MixtureModel model;
  double avg_loglik = -std::numeric_limits<double>::infinity();
};

/// Weight grid used when optimizing the two-component mixing weight.
inline constexpr double kMixtureWeightGridStep = 1e-3;

/// Scans the whole probability simplex over 2^n outcomes (n <= 2) on a
/// grid with the given step and returns the grid point minimizing
/// S[P || R q] together with the attained value. Ties keep the first grid
/// point in enumeration order.
inline LreOracleResult brute_force_lre(const SparseDistribution &p, const ProductChannel &ch,
                                       double grid_step) {
  const std::size_t n = p.qubit_count();
  if (n > 2) {
    throw std::invalid_argument("grid oracle supports at most 2 qubits");
  }
  if (n != ch.qubit_count()) {
    throw std::invalid_argument("distribution and channel qubit counts differ");
  }
  if (p.mode() != NormalizationMode::probability) {
    throw std::invalid_argument("oracle requires a probability-mode input");
  }
  if (!(grid_step > 0.0 && grid_step <= 1e-2)) {
    throw std::invalid_argument("grid step must lie in (0, 1e-2]");
  }
  const std::size_t dim = std::size_t{1} << n;
  const auto steps = static_cast<std::size_t>(std::llround(1.0 / grid_step));

  // Channel entries R(s | xi) for every observed s and every xi.
  std::vector<double> observed_weight;
  std::vector<double> observed_log_weight;
  std::vector<std::vector<double>> entry_rows;
  for (const auto &[s, w] : p.weights()) {
    observed_weight.push_back(w);
    observed_log_weight.push_back(std::log(w));
    std::vector<double> row(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      row[i] = channel_entry(ch, s, Bitstring::from_index(i, n));
    }
    entry_rows.push_back(std::move(row));
  }

  std::vector<std::size_t> ticks(dim, 0);
  std::vector<std::size_t> best_ticks;
  double best = std::numeric_limits<double>::infinity();

  auto evaluate = [&]() {
    double objective = 0.0;
    for (std::size_t row = 0; row < entry_rows.size(); ++row) {
      double t = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        t += entry_rows[row][i] * static_cast<double>(ticks[i]);
      }
      t /= static_cast<double>(steps);
      if (t <= 0.0) {
        return;  // infeasible grid point for this support
      }
      objective += observed_weight[row] * (observed_log_weight[row] - std::log(t));
    }
    if (objective < best) {
      best = objective;
      best_ticks = ticks;
    }
  };

  // Enumerate all compositions of `steps` into dim parts.
  auto recurse = [&](auto &&self, std::size_t coord, std::size_t left) -> void {
    if (coord + 1 == dim) {
      ticks[coord] = left;
      evaluate();
      return;
    }
    for (std::size_t j = 0; j <= left; ++j) {
      ticks[coord] = j;
      self(self, coord + 1, left - j);
    }
  };
  recurse(recurse, 0, steps);

  if (best_ticks.empty()) {
    throw std::invalid_argument("no feasible grid point: channel image vanishes on the support");
  }
  std::map<Bitstring, double> weights;
  for (std::size_t i = 0; i < dim; ++i) {
    if (best_ticks[i] != 0) {
      weights.emplace(Bitstring::from_index(i, n),
                      static_cast<double>(best_ticks[i]) / static_cast<double>(steps));
    }
  }
  return LreOracleResult{SparseDistribution::probability(n, std::move(weights)),
                         std::max(best, 0.0)};
}

namespace detail {

/// Average log-likelihood of a fixed component pair under mixing weight w,
/// from the defining sum.
inline double pair_avg_loglik(const std::vector<double> &counts,
                              const std::vector<double> &likelihood_a,
                              const std::vector<double> &likelihood_b, double w, double total) {
  double sum = 0.0;
  for (std::size_t mu = 0; mu < counts.size(); ++mu) {
    const double mix = w * likelihood_a[mu] + (1.0 - w) * likelihood_b[mu];
    if (mix <= 0.0) {
      return -std::numeric_limits<double>::infinity();
    }
    sum += counts[mu] * std::log(mix);
  }
  return sum / total;
}

}  // namespace detail

/// Exact maximizer of the average log-likelihood over all component
/// bitstring tuples (n <= 4, k <= 2); for k = 2 the mixing weight is
/// optimized on a one-dimensional grid. Ties break lexicographically.
inline MixtureOracleResult brute_force_mixture(const ShotRecord &record, const ProductChannel &ch,
                                               std::size_t k) {
  if (record.n > 4) {
    throw std::invalid_argument("enumeration oracle supports at most 4 qubits");
  }
  if (k < 1 || k > 2) {
    throw std::invalid_argument("enumeration oracle supports k = 1 or 2");
  }
  if (record.n != ch.qubit_count()) {
    throw std::invalid_argument("record and channel qubit counts differ");
  }
  const std::size_t n = record.n;
  const std::size_t dim = std::size_t{1} << n;
  const double total = static_cast<double>(record.shot_count());

  std::map<Bitstring, double> counted;
  for (const auto &shot : record.shots) {
    counted[shot] += 1.0;
  }
  std::vector<Bitstring> shots;
  std::vector<double> counts;
  for (const auto &[bits, c] : counted) {
    shots.push_back(bits);
    counts.push_back(c);
  }

  // likelihoods[i][mu] = R(s_mu | xi_i)
  std::vector<std::vector<double>> likelihoods(dim, std::vector<double>(shots.size()));
  for (std::size_t i = 0; i < dim; ++i) {
    const Bitstring xi = Bitstring::from_index(i, n);
    for (std::size_t mu = 0; mu < shots.size(); ++mu) {
      likelihoods[i][mu] = channel_entry(ch, shots[mu], xi);
    }
  }

  MixtureOracleResult result;
  if (k == 1) {
    for (std::size_t i = 0; i < dim; ++i) {
      double sum = 0.0;
      bool feasible = true;
      for (std::size_t mu = 0; mu < shots.size(); ++mu) {
        if (likelihoods[i][mu] <= 0.0) {
          feasible = false;
          break;
        }
        sum += counts[mu] * std::log(likelihoods[i][mu]);
      }
      if (feasible && sum / total > result.avg_loglik) {
        result.avg_loglik = sum / total;
        result.model = MixtureModel{
            n, {MixtureComponent{Bitstring::from_index(i, n), 1.0}}};
      }
    }
    return result;
  }

  const auto weight_steps =
      static_cast<std::size_t>(std::llround(1.0 / kMixtureWeightGridStep));
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = a; b < dim; ++b) {
      for (std::size_t j = 0; j <= weight_steps; ++j) {
        const double w = static_cast<double>(j) / static_cast<double>(weight_steps);
        const double value =
            detail::pair_avg_loglik(counts, likelihoods[a], likelihoods[b], w, total);
        if (value > result.avg_loglik) {
          result.avg_loglik = value;
          result.model = MixtureModel{
              n,
              {MixtureComponent{Bitstring::from_index(a, n), w},
               MixtureComponent{Bitstring::from_index(b, n), 1.0 - w}}};
        }
      }
    }
  }
  return result;
}

}  // namespace qrem

#endif
