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

#ifndef QREM_MIXTURE_HPP
#define QREM_MIXTURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qrem/bitstring.hpp"
#include "qrem/distribution.hpp"
#include "qrem/errors.hpp"
#include "qrem/noise_model.hpp"
#include "qrem/rng.hpp"

namespace qrem {

// Mitigation for (nearly) deterministic computations: the ideal
// distribution is assumed supported on K unknown bitstrings, and both the
// bitstrings and their weights are recovered from the noisy record by
// expectation-maximization on the average log-likelihood
//
//   L(theta) = (1/M) sum_mu ln sum_nu R(s_mu | xi_nu) p_nu,
//
// whose ascent is equivalent to descending the relative entropy between
// the observed distribution and the channel image of the model.
//
// E step: responsibilities gamma[mu][nu] = R(s_mu|xi_nu) p_nu / sum_nu' (...).
// M step: p_nu <- (1/M) sum_mu gamma[mu][nu], and each component bitstring
// is re-estimated bit by bit: because ln R factorizes over qubits, bit k of
// xi_nu is the argmax over b of sum_mu gamma[mu][nu] ln R_k(s_mu,k | b).

/// Weights below this floor are lifted before entering a logarithm, so
/// responsibilities stay defined for dying components.
inline constexpr double kComponentWeightFloor = 1e-15;

/// Components below this weight are dropped from converged models.
inline constexpr double kComponentDropThreshold = 1e-12;

struct MixtureComponent {
  Bitstring bitstring;
  double weight = 0.0;

  bool operator==(const MixtureComponent &other) const = default;
};

/// K support bitstrings with probability weights summing to one.
struct MixtureModel {
  std::size_t n = 0;
  std::vector<MixtureComponent> components;

  static MixtureModel create(std::size_t n, std::vector<MixtureComponent> components) {
    if (components.empty()) {
      throw std::invalid_argument("mixture requires at least one component");
    }
    double total = 0.0;
    for (const auto &c : components) {
      if (c.bitstring.size() != n) {
        throw std::invalid_argument("component bitstring length does not match qubit count");
      }
      if (c.weight < 0.0) {
        throw std::invalid_argument("component weight is negative");
      }
      total += c.weight;
    }
    if (std::abs(total - 1.0) > kNormalizationTol) {
      throw std::invalid_argument("component weights sum to " + std::to_string(total));
    }
    return MixtureModel{n, std::move(components)};
  }

  std::size_t component_count() const { return components.size(); }

  SparseDistribution to_distribution() const {
    std::map<Bitstring, double> weights;
    for (const auto &c : components) {
      weights[c.bitstring] += c.weight;
    }
    return SparseDistribution::probability(n, std::move(weights));
  }
};

struct EmConfig {
  std::size_t k = 1;
  std::size_t restarts = 10;
  std::size_t max_iter = 500;
  double tol_loglik = 1e-10;
  std::uint64_t seed = 0;

  void validate() const {
    if (k < 1 || restarts < 1 || max_iter < 1) {
      throw std::invalid_argument("k, restarts and max_iter must all be at least 1");
    }
  }
};

struct EmResult {
  MixtureModel model;
  double avg_loglik = -std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  std::size_t restart_index = 0;
  std::vector<double> loglik_trace;
  bool converged = false;
};

namespace detail {

/// Distinct shots with multiplicities; every EM sum over shots runs over
/// this form, weighted by count.
struct AggregatedRecord {
  std::size_t n = 0;
  double total = 0.0;
  std::vector<Bitstring> shots;
  std::vector<double> counts;
};

inline AggregatedRecord aggregate_record(const ShotRecord &record) {
  std::map<Bitstring, double> counts;
  for (const auto &shot : record.shots) {
    counts[shot] += 1.0;
  }
  AggregatedRecord agg;
  agg.n = record.n;
  agg.total = static_cast<double>(record.shot_count());
  agg.shots.reserve(counts.size());
  agg.counts.reserve(counts.size());
  for (auto &[bits, count] : counts) {
    agg.shots.push_back(bits);
    agg.counts.push_back(count);
  }
  return agg;
}

/// ln R(s | xi) evaluated as base + sum over set bits of s of delta[k],
/// where base = sum_k ln R_k(0 | xi_k) and delta[k] = ln R_k(1|xi_k) -
/// ln R_k(0|xi_k). Rates are clamped, so everything is finite.
struct ComponentLogTable {
  double base = 0.0;
  std::vector<double> delta;
};

inline ComponentLogTable component_log_table(const ProductChannel &ch, const Bitstring &xi) {
  ComponentLogTable table;
  const std::size_t n = ch.qubit_count();
  table.delta.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double l0 = ch.qubit(k).log_entry(0, xi.bit(k));
    const double l1 = ch.qubit(k).log_entry(1, xi.bit(k));
    table.base += l0;
    table.delta[k] = l1 - l0;
  }
  return table;
}

inline double table_log_likelihood(const ComponentLogTable &table, const Bitstring &s) {
  double value = table.base;
  s.for_each_one([&](std::size_t k) { value += table.delta[k]; });
  return value;
}

inline std::vector<ComponentLogTable> model_log_tables(const ProductChannel &ch,
                                                       const MixtureModel &model) {
  std::vector<ComponentLogTable> tables;
  tables.reserve(model.components.size());
  for (const auto &c : model.components) {
    tables.push_back(component_log_table(ch, c.bitstring));
  }
  return tables;
}

/// Fills row with the responsibilities of one shot and returns its
/// log-likelihood ln sum_nu R(s|xi_nu) p_nu via log-sum-exp.
inline double responsibility_row(const std::vector<ComponentLogTable> &tables,
                                 const std::vector<double> &log_weights, const Bitstring &shot,
                                 std::vector<double> &row) {
  const std::size_t k = tables.size();
  row.resize(k);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t nu = 0; nu < k; ++nu) {
    row[nu] = table_log_likelihood(tables[nu], shot) + log_weights[nu];
    peak = std::max(peak, row[nu]);
  }
  double sum = 0.0;
  for (std::size_t nu = 0; nu < k; ++nu) {
    row[nu] = std::exp(row[nu] - peak);
    sum += row[nu];
  }
  for (std::size_t nu = 0; nu < k; ++nu) {
    row[nu] /= sum;
  }
  return peak + std::log(sum);
}

inline std::vector<double> floored_log_weights(const MixtureModel &model) {
  std::vector<double> logs;
  logs.reserve(model.components.size());
  for (const auto &c : model.components) {
    logs.push_back(std::log(std::max(c.weight, kComponentWeightFloor)));
  }
  return logs;
}

/// One full EM step on aggregated shots. Returns the new model and, through
/// avg_loglik_out, the average log-likelihood of the *input* model.
inline MixtureModel em_step_aggregated(const AggregatedRecord &agg, const ProductChannel &ch,
                                       const MixtureModel &model, double *avg_loglik_out) {
  const std::size_t k = model.components.size();
  const std::size_t n = agg.n;
  const auto tables = model_log_tables(ch, model);
  const auto log_weights = floored_log_weights(model);

  std::vector<double> gamma_total(k, 0.0);           // sum_mu c_mu gamma[mu][nu]
  std::vector<std::vector<double>> ones_weight(k, std::vector<double>(n, 0.0));
  std::vector<double> row;
  double loglik = 0.0;
  for (std::size_t mu = 0; mu < agg.shots.size(); ++mu) {
    const double count = agg.counts[mu];
    loglik += count * responsibility_row(tables, log_weights, agg.shots[mu], row);
    for (std::size_t nu = 0; nu < k; ++nu) {
      gamma_total[nu] += count * row[nu];
    }
    agg.shots[mu].for_each_one([&](std::size_t bit) {
      for (std::size_t nu = 0; nu < k; ++nu) {
        ones_weight[nu][bit] += count * row[nu];
      }
    });
  }
  if (avg_loglik_out != nullptr) {
    *avg_loglik_out = loglik / agg.total;
  }

  MixtureModel next;
  next.n = n;
  next.components.resize(k);
  for (std::size_t nu = 0; nu < k; ++nu) {
    next.components[nu].weight = gamma_total[nu] / agg.total;
    Bitstring xi(n);
    for (std::size_t bit = 0; bit < n; ++bit) {
      const auto &q = ch.qubit(bit);
      const double w1 = ones_weight[nu][bit];
      const double w0 = gamma_total[nu] - w1;
      const double score0 = w0 * std::log(1.0 - clamp_rate(q.r1_given_0)) +
                            w1 * std::log(clamp_rate(q.r1_given_0));
      const double score1 = w0 * std::log(clamp_rate(q.r0_given_1)) +
                            w1 * std::log(1.0 - clamp_rate(q.r0_given_1));
      if (score1 > score0) {  // ties resolve to bit value 0
        xi.set_bit(bit, 1);
      }
    }
    next.components[nu].bitstring = std::move(xi);
  }
  return next;
}

inline double avg_loglik_aggregated(const AggregatedRecord &agg, const ProductChannel &ch,
                                    const MixtureModel &model) {
  const auto tables = model_log_tables(ch, model);
  const auto log_weights = floored_log_weights(model);
  std::vector<double> row;
  double loglik = 0.0;
  for (std::size_t mu = 0; mu < agg.shots.size(); ++mu) {
    loglik += agg.counts[mu] * responsibility_row(tables, log_weights, agg.shots[mu], row);
  }
  return loglik / agg.total;
}

/// Frequency-weighted draw of K distinct shots (without replacement) as
/// initial component bitstrings. If the record has fewer distinct shots
/// than K, the remainder is padded with random bitstrings.
inline std::vector<Bitstring> initial_components(const AggregatedRecord &agg, std::size_t k,
                                                 Rng &rng) {
  std::vector<Bitstring> chosen;
  chosen.reserve(k);
  std::vector<double> remaining = agg.counts;
  while (chosen.size() < k) {
    double total = 0.0;
    for (double c : remaining) {
      total += c;
    }
    if (total <= 0.0) {
      break;  // distinct shots exhausted
    }
    double target = rng.next_double() * total;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      if (remaining[i] <= 0.0) {
        continue;
      }
      idx = i;
      if (target < remaining[i]) {
        break;
      }
      target -= remaining[i];
    }
    chosen.push_back(agg.shots[idx]);
    remaining[idx] = 0.0;
  }
  while (chosen.size() < k) {
    Bitstring candidate(agg.n);
    for (int attempt = 0; attempt < 64; ++attempt) {
      for (std::size_t bit = 0; bit < agg.n; ++bit) {
        candidate.set_bit(bit, static_cast<int>(rng.next_u64() & 1u));
      }
      if (std::find(chosen.begin(), chosen.end(), candidate) == chosen.end()) {
        break;
      }
    }
    chosen.push_back(candidate);
  }
  return chosen;
}

inline bool same_bitstrings(const MixtureModel &a, const MixtureModel &b) {
  for (std::size_t nu = 0; nu < a.components.size(); ++nu) {
    if (!(a.components[nu].bitstring == b.components[nu].bitstring)) {
      return false;
    }
  }
  return true;
}

/// Merges duplicate component bitstrings (weights summed), drops residual
/// components, renormalizes, and orders by descending weight.
inline MixtureModel canonicalize_model(const MixtureModel &model) {
  std::map<Bitstring, double> merged;
  for (const auto &c : model.components) {
    merged[c.bitstring] += c.weight;
  }
  double total = 0.0;
  for (auto it = merged.begin(); it != merged.end();) {
    if (it->second < kComponentDropThreshold && merged.size() > 1) {
      it = merged.erase(it);
    } else {
      total += it->second;
      ++it;
    }
  }
  MixtureModel out;
  out.n = model.n;
  out.components.reserve(merged.size());
  for (const auto &[bits, w] : merged) {
    out.components.push_back(MixtureComponent{bits, w / total});
  }
  std::stable_sort(out.components.begin(), out.components.end(),
                   [](const MixtureComponent &a, const MixtureComponent &b) {
                     if (a.weight != b.weight) {
                       return a.weight > b.weight;
                     }
                     return a.bitstring < b.bitstring;
                   });
  return out;
}

}  // namespace detail

/// The M x K responsibility matrix gamma[mu][nu], one row per shot in
/// record order; rows sum to one.
inline std::vector<std::vector<double>> responsibilities(const ShotRecord &record,
                                                         const ProductChannel &ch,
                                                         const MixtureModel &model) {
  if (record.n != ch.qubit_count() || record.n != model.n) {
    throw std::invalid_argument("record, channel and model qubit counts differ");
  }
  const auto tables = detail::model_log_tables(ch, model);
  const auto log_weights = detail::floored_log_weights(model);
  std::vector<std::vector<double>> gamma(record.shot_count());
  for (std::size_t mu = 0; mu < record.shot_count(); ++mu) {
    detail::responsibility_row(tables, log_weights, record.shots[mu], gamma[mu]);
  }
  return gamma;
}

/// One expectation-maximization step: new weights from responsibility
/// totals, new component bitstrings from the per-bit weighted argmax.
inline MixtureModel em_step(const ShotRecord &record, const ProductChannel &ch,
                            const MixtureModel &model) {
  if (record.n != ch.qubit_count() || record.n != model.n) {
    throw std::invalid_argument("record, channel and model qubit counts differ");
  }
  return detail::em_step_aggregated(detail::aggregate_record(record), ch, model, nullptr);
}

/// (1/M) sum_mu ln sum_nu R(s_mu|xi_nu) p_nu.
inline double average_log_likelihood(const ShotRecord &record, const ProductChannel &ch,
                                     const MixtureModel &model) {
  if (record.n != ch.qubit_count() || record.n != model.n) {
    throw std::invalid_argument("record, channel and model qubit counts differ");
  }
  return detail::avg_loglik_aggregated(detail::aggregate_record(record), ch, model);
}

/// Fits a K-component mixture by EM with seeded random restarts. A restart
/// stops when the component bitstrings repeat and the average
/// log-likelihood has stabilized; the restart with the highest likelihood
/// wins. Duplicate components of the winner are merged.
inline EmResult fit_mixture(const ShotRecord &record, const ProductChannel &ch,
                            const EmConfig &cfg) {
  cfg.validate();
  if (record.n != ch.qubit_count()) {
    throw std::invalid_argument("record and channel qubit counts differ");
  }
  const detail::AggregatedRecord agg = detail::aggregate_record(record);

  EmResult best;
  bool have_best = false;
  for (std::size_t restart = 0; restart < cfg.restarts; ++restart) {
    Rng rng(derive_seed(cfg.seed, restart));
    auto bitstrings = detail::initial_components(agg, cfg.k, rng);
    MixtureModel model;
    model.n = agg.n;
    model.components.reserve(cfg.k);
    for (auto &bits : bitstrings) {
      model.components.push_back(MixtureComponent{std::move(bits), 1.0 / cfg.k});
    }

    // Each E step yields the likelihood of its input model as a byproduct,
    // so the loop learns ll(theta_r) while computing theta_{r+1} and stops
    // once the bitstrings repeat and the likelihood has stabilized.
    std::vector<double> trace;
    MixtureModel previous = model;
    double previous_loglik = 0.0;
    double loglik = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    for (std::size_t iter = 1; iter <= cfg.max_iter; ++iter) {
      MixtureModel next = detail::em_step_aggregated(agg, ch, model, &loglik);
      trace.push_back(loglik);
      if (iter >= 2 && detail::same_bitstrings(model, previous) &&
          std::abs(loglik - previous_loglik) < cfg.tol_loglik) {
        converged = true;  // model already repeats; discard the extra step
        break;
      }
      previous = std::move(model);
      previous_loglik = loglik;
      model = std::move(next);
      iterations = iter;
    }
    if (!converged) {
      loglik = detail::avg_loglik_aggregated(agg, ch, model);
      trace.push_back(loglik);
    }

    if (!have_best || loglik > best.avg_loglik) {
      have_best = true;
      best.model = std::move(model);
      best.avg_loglik = loglik;
      best.iterations = iterations;
      best.restart_index = restart;
      best.loglik_trace = std::move(trace);
      best.converged = converged;
    }
  }

  best.model = detail::canonicalize_model(best.model);
  best.avg_loglik = detail::avg_loglik_aggregated(agg, ch, best.model);
  return best;
}

/// Fits K = 1..k_max with the same configuration, for manual model-size
/// selection by likelihood.
inline std::vector<EmResult> sweep_mixture(const ShotRecord &record, const ProductChannel &ch,
                                           EmConfig cfg, std::size_t k_max) {
  if (k_max < 1) {
    throw std::invalid_argument("k_max must be at least 1");
  }
  std::vector<EmResult> results;
  results.reserve(k_max);
  for (std::size_t k = 1; k <= k_max; ++k) {
    cfg.k = k;
    results.push_back(fit_mixture(record, ch, cfg));
  }
  return results;
}

/// Total weight the model places on the all-zeros and all-ones strings.
inline double model_correlation(const MixtureModel &model) {
  double total = 0.0;
  for (const auto &c : model.components) {
    if (c.bitstring.all_zeros() || c.bitstring.all_ones()) {
      total += c.weight;
    }
  }
  return total;
}

}  // namespace qrem

#endif
