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

#ifndef QREM_IBU_HPP
#define QREM_IBU_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qrem/distribution.hpp"
#include "qrem/least_squares.hpp"
#include "qrem/noise_model.hpp"

namespace qrem {

// Iterative Bayesian unfolding. The multiplicative update
//
//   Q'(xi) = Q(xi) * sum_s P(s) R(s|xi) / (R Q)(s)
//
// is an expectation-maximization step for minimizing the relative entropy
// S[P || R Q] over the simplex, so the objective is non-increasing along
// the iteration and iterates started positive stay positive.

struct IbuConfig {
  enum class Init { uniform, empirical, custom };

  std::size_t max_iter = 1000;
  double tol_l1 = 1e-10;  ///< stop when successive iterates move less than this in L1
  Init init = Init::uniform;
  std::optional<SparseDistribution> custom_init;
  bool track_objective = false;
  std::size_t dense_limit = kDefaultDenseLimit;
};

struct IbuResult {
  SparseDistribution q;
  std::size_t iterations = 0;
  std::vector<double> objective_trace;  ///< S[P || R Q^(r)] per iterate when tracked
  bool converged = false;
};

namespace detail {

struct PSupport {
  std::vector<std::size_t> index;
  std::vector<double> weight;
  std::vector<double> log_weight;
};

inline PSupport collect_p_support(const SparseDistribution &p, std::size_t dense_limit) {
  if (p.mode() != NormalizationMode::probability) {
    throw std::invalid_argument("observed distribution must be probability mode");
  }
  PSupport ps;
  ps.index.reserve(p.support_size());
  ps.weight.reserve(p.support_size());
  ps.log_weight.reserve(p.support_size());
  if (p.qubit_count() > dense_limit) {
    throw std::invalid_argument("qubit count exceeds dense limit");
  }
  for (const auto &[bits, w] : p.weights()) {
    ps.index.push_back(bits.to_index());
    ps.weight.push_back(w);
    ps.log_weight.push_back(std::log(w));
  }
  return ps;
}

inline double objective_against(const PSupport &ps, const std::vector<double> &forward) {
  double sum = 0.0;
  for (std::size_t i = 0; i < ps.index.size(); ++i) {
    const double t = forward[ps.index[i]];
    if (t <= 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    sum += ps.weight[i] * (ps.log_weight[i] - std::log(t));
  }
  return std::max(sum, 0.0);
}

/// One multiplicative update of the dense iterate. Returns the L1 distance
/// between the old and new iterate; optionally reports S[P || R Q] at the
/// pre-update iterate (the forward pass is shared).
inline double ibu_dense_update(const PSupport &ps, const ProductChannel &ch,
                               std::vector<double> &q, std::vector<double> &t,
                               std::vector<double> &u, double *objective_out) {
  t = q;
  forward_in_place(ch, t);
  if (objective_out != nullptr) {
    *objective_out = objective_against(ps, t);
  }
  u.assign(q.size(), 0.0);
  for (std::size_t i = 0; i < ps.index.size(); ++i) {
    const double denom = t[ps.index[i]];
    if (denom <= 0.0) {
      throw InfeasibleSupportError(
          "observed bitstring with positive weight has zero probability under the channel; "
          "this requires exact-zero rates");
    }
    u[ps.index[i]] = ps.weight[i] / denom;
  }
  transpose_forward_in_place(ch, u);
  double l1 = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double next = q[j] * u[j];
    l1 += std::abs(next - q[j]);
    q[j] = next;
  }
  return l1;
}

inline std::vector<double> initial_dense(const SparseDistribution &p, const IbuConfig &cfg) {
  const std::size_t n = p.qubit_count();
  const std::size_t dim = std::size_t{1} << n;
  switch (cfg.init) {
    case IbuConfig::Init::uniform:
      return std::vector<double>(dim, 1.0 / static_cast<double>(dim));
    case IbuConfig::Init::empirical:
      return p.to_dense(cfg.dense_limit);
    case IbuConfig::Init::custom: {
      if (!cfg.custom_init.has_value()) {
        throw std::invalid_argument("custom init selected but no distribution given");
      }
      if (cfg.custom_init->qubit_count() != n ||
          cfg.custom_init->mode() != NormalizationMode::probability) {
        throw std::invalid_argument("custom init must be a probability distribution over n bits");
      }
      return cfg.custom_init->to_dense(cfg.dense_limit);
    }
  }
  throw std::invalid_argument("unknown init mode");
}

}  // namespace detail

/// A single update from q_prev. The output support never grows beyond
/// support(q_prev), and entries started positive stay positive.
inline SparseDistribution ibu_step(const SparseDistribution &p, const ProductChannel &ch,
                                   const SparseDistribution &q_prev,
                                   std::size_t dense_limit = kDefaultDenseLimit) {
  detail::require_dense(ch, p, dense_limit);
  if (q_prev.qubit_count() != p.qubit_count()) {
    throw std::invalid_argument("estimate and observation qubit counts differ");
  }
  const detail::PSupport ps = detail::collect_p_support(p, dense_limit);
  std::vector<double> q = q_prev.to_dense(dense_limit);
  std::vector<double> t, u;
  detail::ibu_dense_update(ps, ch, q, t, u, nullptr);
  return SparseDistribution::from_dense(p.qubit_count(), q, NormalizationMode::probability);
}

/// Runs the update until the L1 motion drops below tol_l1 or max_iter is
/// reached. Non-convergence is reported through the flag, never thrown.
inline IbuResult mitigate_full_ibu(const SparseDistribution &p, const ProductChannel &ch,
                                   const IbuConfig &cfg = {}) {
  if (cfg.max_iter < 1) {
    throw std::invalid_argument("max_iter must be at least 1");
  }
  if (!(cfg.tol_l1 > 0.0)) {
    throw std::invalid_argument("tol_l1 must be positive");
  }
  detail::require_dense(ch, p, cfg.dense_limit);
  const detail::PSupport ps = detail::collect_p_support(p, cfg.dense_limit);
  std::vector<double> q = detail::initial_dense(p, cfg);
  std::vector<double> t, u;

  IbuResult result;
  double objective = 0.0;
  for (std::size_t iter = 1; iter <= cfg.max_iter; ++iter) {
    const double l1 = detail::ibu_dense_update(ps, ch, q, t, u,
                                               cfg.track_objective ? &objective : nullptr);
    if (cfg.track_objective) {
      result.objective_trace.push_back(objective);
    }
    result.iterations = iter;
    if (l1 < cfg.tol_l1) {
      result.converged = true;
      break;
    }
  }
  if (cfg.track_objective) {
    t = q;
    detail::forward_in_place(ch, t);
    result.objective_trace.push_back(detail::objective_against(ps, t));
  }
  result.q = SparseDistribution::from_dense(p.qubit_count(), q, NormalizationMode::probability);
  return result;
}

/// Full-mode unfolding of the l-bit empirical marginal with the restricted
/// channel. Works for any n as long as the subgroup stays small.
inline IbuResult mitigate_marginal_ibu(const ShotRecord &record, const ProductChannel &ch,
                                       const BitSubset &subset, const IbuConfig &cfg = {}) {
  if (record.n != ch.qubit_count()) {
    throw std::invalid_argument("record and channel qubit counts differ");
  }
  if (subset.size() > kMaxMarginalBits) {
    throw std::invalid_argument("subset size exceeds marginal limit " +
                                std::to_string(kMaxMarginalBits));
  }
  return mitigate_full_ibu(empirical_marginal(record, subset), ch.restricted(subset), cfg);
}

/// S[P || R q], the objective the iteration minimizes. +infinity when R q
/// vanishes somewhere on P's support.
inline double lre_objective(const SparseDistribution &p, const ProductChannel &ch,
                            const SparseDistribution &q,
                            std::size_t dense_limit = kDefaultDenseLimit) {
  if (p.qubit_count() != q.qubit_count() || p.qubit_count() != ch.qubit_count()) {
    throw std::invalid_argument("qubit counts differ");
  }
  if (p.mode() != NormalizationMode::probability || q.mode() != NormalizationMode::probability) {
    throw std::invalid_argument("lre_objective requires probability-mode inputs");
  }
  if (p.qubit_count() <= dense_limit) {
    const detail::PSupport ps = detail::collect_p_support(p, dense_limit);
    std::vector<double> t = q.to_dense(dense_limit);
    detail::forward_in_place(ch, t);
    return detail::objective_against(ps, t);
  }
  // Beyond the dense limit: direct support-by-support evaluation.
  double sum = 0.0;
  for (const auto &[s, pw] : p.weights()) {
    double t = 0.0;
    for (const auto &[xi, qw] : q.weights()) {
      t += channel_entry(ch, s, xi) * qw;
    }
    if (t <= 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    sum += pw * std::log(pw / t);
  }
  return std::max(sum, 0.0);
}

}  // namespace qrem

#endif
