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

#ifndef QREM_LOCAL_PROTOCOL_HPP
#define QREM_LOCAL_PROTOCOL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qrem/distribution.hpp"
#include "qrem/errors.hpp"
#include "qrem/ibu.hpp"
#include "qrem/least_squares.hpp"
#include "qrem/noise_model.hpp"
#include "qrem/rng.hpp"

namespace qrem {

// Mitigation of local observables: most observables of interest depend on
// a few bits only, and because the noise factorizes per qubit the marginal
// over any bit subgroup sees exactly the restricted channel. The protocol
// samples random subgroups of size l, mitigates each l-bit marginal, and
// averages the local correlation C_l across subgroups.

enum class MitigationMethod { raw, lsq, ibu };

inline std::string to_string(MitigationMethod method) {
  switch (method) {
    case MitigationMethod::raw:
      return "raw";
    case MitigationMethod::lsq:
      return "lsq";
    case MitigationMethod::ibu:
      return "ibu";
  }
  return "?";
}

inline MitigationMethod method_from_string(const std::string &name) {
  if (name == "raw") {
    return MitigationMethod::raw;
  }
  if (name == "lsq") {
    return MitigationMethod::lsq;
  }
  if (name == "ibu") {
    return MitigationMethod::ibu;
  }
  throw ParseError("unknown method '" + name + "' (expected raw, lsq or ibu)");
}

struct LocalProtocolConfig {
  std::size_t l = 2;
  std::size_t groups = 300;
  std::vector<MitigationMethod> methods = {MitigationMethod::raw, MitigationMethod::lsq,
                                           MitigationMethod::ibu};
  std::uint64_t seed = 0;
  bool dedup_subgroups = false;  ///< redraw colliding subgroups when set
  IbuConfig ibu;

  void validate(std::size_t n) const {
    if (l < 1 || l > n) {
      throw std::invalid_argument("subgroup size must satisfy 1 <= l <= n");
    }
    if (l > kMaxMarginalBits) {
      throw std::invalid_argument("subgroup size exceeds marginal limit " +
                                  std::to_string(kMaxMarginalBits));
    }
    if (groups < 1) {
      throw std::invalid_argument("group count must be positive");
    }
    if (methods.empty()) {
      throw std::invalid_argument("at least one method required");
    }
  }
};

struct LocalProtocolResult {
  std::vector<BitSubset> subgroups;
  /// One value per subgroup and method; NaN where a subgroup was skipped.
  std::map<MitigationMethod, std::vector<double>> values;
  /// Mean over the contributing (non-skipped) subgroups.
  std::map<MitigationMethod, double> means;
  std::vector<std::size_t> lsq_skipped;      ///< subgroups with a singular local channel
  std::vector<std::size_t> ibu_nonconverged; ///< still contribute their final iterate
};

struct BootstrapConfig {
  std::size_t resamples = 190;
  std::size_t resample_size = 2000;
  std::uint64_t seed = 0;
};

struct BootstrapResult {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> values;
};

/// Draws `groups` subgroups of l distinct indices, each uniform over the
/// size-l subsets; subgroups are independent, so repeats across the list
/// can occur unless dedup is requested.
inline std::vector<BitSubset> sample_subgroups(std::size_t n, const LocalProtocolConfig &cfg) {
  cfg.validate(n);
  Rng rng(cfg.seed);
  std::set<std::vector<std::size_t>> seen;
  std::vector<BitSubset> subgroups;
  subgroups.reserve(cfg.groups);
  std::size_t attempts = 0;
  const std::size_t attempt_limit = cfg.groups * 1000 + 1000;
  while (subgroups.size() < cfg.groups) {
    if (++attempts > attempt_limit) {
      throw std::invalid_argument("cannot draw enough distinct subgroups");
    }
    // Floyd's algorithm: uniform over l-subsets of {0, ..., n-1}.
    std::vector<std::size_t> indices;
    indices.reserve(cfg.l);
    for (std::size_t j = n - cfg.l; j < n; ++j) {
      const std::size_t t = static_cast<std::size_t>(rng.next_below(j + 1));
      if (std::find(indices.begin(), indices.end(), t) != indices.end()) {
        indices.push_back(j);
      } else {
        indices.push_back(t);
      }
    }
    std::sort(indices.begin(), indices.end());
    if (cfg.dedup_subgroups && !seen.insert(indices).second) {
      continue;
    }
    subgroups.push_back(BitSubset::of(std::move(indices)));
  }
  return subgroups;
}

/// Per-subgroup local correlations for the requested methods, plus their
/// means. raw reads the empirical marginal directly; lsq and ibu mitigate
/// it with the restricted channel first.
inline LocalProtocolResult run_local_protocol(const ShotRecord &record, const ProductChannel &ch,
                                              const LocalProtocolConfig &cfg) {
  if (record.n != ch.qubit_count()) {
    throw std::invalid_argument("record and channel qubit counts differ");
  }
  cfg.validate(record.n);
  LocalProtocolResult result;
  result.subgroups = sample_subgroups(record.n, cfg);
  for (auto method : cfg.methods) {
    result.values[method] = {};
    result.values[method].reserve(cfg.groups);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t g = 0; g < result.subgroups.size(); ++g) {
    const BitSubset &subset = result.subgroups[g];
    const SparseDistribution marginal = empirical_marginal(record, subset);
    const ProductChannel local = ch.restricted(subset);
    for (auto method : cfg.methods) {
      switch (method) {
        case MitigationMethod::raw:
          result.values[method].push_back(global_correlation(marginal));
          break;
        case MitigationMethod::lsq:
          if (local.any_near_singular()) {
            result.lsq_skipped.push_back(g);
            result.values[method].push_back(nan);
          } else {
            result.values[method].push_back(
                global_correlation(mitigate_full_lsq(marginal, local, kMaxMarginalBits).q));
          }
          break;
        case MitigationMethod::ibu: {
          IbuConfig ibu_cfg = cfg.ibu;
          ibu_cfg.dense_limit = std::max(ibu_cfg.dense_limit, kMaxMarginalBits);
          const IbuResult unfolded = mitigate_full_ibu(marginal, local, ibu_cfg);
          if (!unfolded.converged) {
            result.ibu_nonconverged.push_back(g);
          }
          result.values[method].push_back(global_correlation(unfolded.q));
          break;
        }
      }
    }
  }
  for (auto method : cfg.methods) {
    double sum = 0.0;
    std::size_t contributing = 0;
    for (double v : result.values[method]) {
      if (!std::isnan(v)) {
        sum += v;
        ++contributing;
      }
    }
    result.means[method] = contributing == 0 ? nan : sum / static_cast<double>(contributing);
  }
  return result;
}

/// Resamples the record with replacement and applies the statistic to each
/// resample. Deterministic under the seed.
inline BootstrapResult bootstrap_statistic(const ShotRecord &record, const BootstrapConfig &cfg,
                                           const std::function<double(const ShotRecord &)> &statistic) {
  if (cfg.resamples < 1 || cfg.resample_size < 1) {
    throw std::invalid_argument("resamples and resample_size must be positive");
  }
  Rng rng(cfg.seed);
  BootstrapResult result;
  result.values.reserve(cfg.resamples);
  const std::size_t m = record.shot_count();
  for (std::size_t b = 0; b < cfg.resamples; ++b) {
    std::vector<Bitstring> shots;
    shots.reserve(cfg.resample_size);
    for (std::size_t i = 0; i < cfg.resample_size; ++i) {
      shots.push_back(record.shots[static_cast<std::size_t>(rng.next_below(m))]);
    }
    result.values.push_back(statistic(ShotRecord{record.n, std::move(shots)}));
  }
  double sum = 0.0;
  for (double v : result.values) {
    sum += v;
  }
  result.mean = sum / static_cast<double>(cfg.resamples);
  if (cfg.resamples > 1) {
    double ss = 0.0;
    for (double v : result.values) {
      ss += (v - result.mean) * (v - result.mean);
    }
    result.stddev = std::sqrt(ss / static_cast<double>(cfg.resamples - 1));
  }
  return result;
}

}  // namespace qrem

#endif
