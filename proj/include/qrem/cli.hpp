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

#ifndef QREM_CLI_HPP
#define QREM_CLI_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qrem/distribution.hpp"
#include "qrem/errors.hpp"
#include "qrem/ibu.hpp"
#include "qrem/io.hpp"
#include "qrem/least_squares.hpp"
#include "qrem/local_protocol.hpp"
#include "qrem/mixture.hpp"
#include "qrem/noise_model.hpp"
#include "qrem/oracles.hpp"
#include "qrem/synthetic.hpp"

namespace qrem::cli {

// Exit codes: 0 success, 1 validation error (flags or input files),
// 2 runtime failure.

namespace detail {

// Seed streams derived from the user seed, one per independent consumer.
inline constexpr std::uint64_t kStreamDeviceProfile = 1;
inline constexpr std::uint64_t kStreamShotSampling = 2;
inline constexpr std::uint64_t kStreamBootstrap = 3;
inline constexpr std::uint64_t kStreamStatistic = 4;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

inline std::pair<double, double> parse_rate_range(const std::string &text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw ParseError("expected --rates LOW,HIGH");
  }
  try {
    const double low = std::stod(text.substr(0, comma));
    const double high = std::stod(text.substr(comma + 1));
    return {low, high};
  } catch (const std::exception &) {
    throw ParseError("cannot parse rate range '" + text + "'");
  }
}

inline std::vector<MitigationMethod> parse_methods(const std::string &text) {
  std::vector<MitigationMethod> methods;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (token.empty()) {
      continue;
    }
    const MitigationMethod method = method_from_string(token);
    if (std::find(methods.begin(), methods.end(), method) == methods.end()) {
      methods.push_back(method);
    }
  }
  if (methods.empty()) {
    throw ParseError("no methods given");
  }
  return methods;
}

inline void note_clamp_warnings(const ProductChannel &ch, RunManifest &manifest) {
  for (std::size_t k : ch.clamped_qubits()) {
    manifest.warnings.push_back("calibration rate clamped into the open interval for qubit " +
                                std::to_string(k));
  }
}

struct SimulateOptions {
  std::size_t n = 0;
  std::string truth = "ghz";
  std::string rates;
  std::size_t shots = 0;
  std::uint64_t seed = 0;
  std::string out;
};

inline void run_simulate(const SimulateOptions &opt) {
  Timer timer;
  const auto [rate_low, rate_high] = parse_rate_range(opt.rates);
  RunManifest manifest;
  manifest.command = "simulate";
  manifest.config = {{"n", opt.n},       {"truth", opt.truth}, {"rate_low", rate_low},
                     {"rate_high", rate_high}, {"shots", opt.shots}, {"seed", opt.seed},
                     {"out", opt.out}};

  SparseDistribution truth;
  if (opt.truth == "ghz") {
    truth = make_ghz_truth(opt.n, 0.5);
  } else {
    truth = read_distribution(opt.truth);
    manifest.add_input("truth", opt.truth);
    if (truth.qubit_count() != opt.n) {
      throw ParseError("truth file has " + std::to_string(truth.qubit_count()) +
                       " qubits, --n says " + std::to_string(opt.n));
    }
  }
  const ProductChannel channel =
      make_device_profile(opt.n, rate_low, rate_high, derive_seed(opt.seed, kStreamDeviceProfile));
  const ShotRecord record =
      sample_noisy_shots(channel, truth, opt.shots, derive_seed(opt.seed, kStreamShotSampling));

  write_shots_text(opt.out + "_shots.txt", record);
  write_calibration(opt.out + "_calibration.json", channel);
  manifest.duration_ms = timer.elapsed_ms();
  qrem::detail::write_file_atomic(opt.out + "_manifest.json", manifest.to_json().dump(2) + "\n");
}

struct MitigateFullOptions {
  std::string shots;
  std::string calibration;
  std::string method = "lsq";
  std::size_t max_iter = 1000;
  double tol = 1e-10;
  std::string init = "uniform";
  std::string out;
};

inline void run_mitigate_full(const MitigateFullOptions &opt) {
  Timer timer;
  RunManifest manifest;
  manifest.command = "mitigate-full";
  manifest.config = {{"shots", opt.shots}, {"calibration", opt.calibration},
                     {"method", opt.method}, {"max_iter", opt.max_iter},
                     {"tol", opt.tol},       {"init", opt.init}};
  manifest.add_input("shots", opt.shots);
  manifest.add_input("calibration", opt.calibration);

  const ShotRecord record = read_shots(opt.shots);
  const ProductChannel channel = read_calibration(opt.calibration);
  note_clamp_warnings(channel, manifest);
  const SparseDistribution p = empirical_distribution(record);

  json results;
  results["method"] = opt.method;
  if (opt.method == "lsq") {
    const LsqResult lsq = mitigate_full_lsq(p, channel);
    results["distribution"] = distribution_to_json(lsq.q);
    results["nonnegative"] = lsq.nonnegative;
  } else if (opt.method == "ibu") {
    IbuConfig cfg;
    cfg.max_iter = opt.max_iter;
    cfg.tol_l1 = opt.tol;
    cfg.track_objective = true;
    if (opt.init == "uniform") {
      cfg.init = IbuConfig::Init::uniform;
    } else if (opt.init == "empirical") {
      cfg.init = IbuConfig::Init::empirical;
    } else {
      throw ParseError("unknown init '" + opt.init + "' (expected uniform or empirical)");
    }
    const IbuResult unfolded = mitigate_full_ibu(p, channel, cfg);
    results["distribution"] = distribution_to_json(unfolded.q);
    results["iterations"] = unfolded.iterations;
    results["converged"] = unfolded.converged;
    results["objective"] = unfolded.objective_trace.back();
    results["objective_trace"] = unfolded.objective_trace;
  } else {
    throw ParseError("unknown method '" + opt.method + "' (expected lsq or ibu)");
  }
  manifest.duration_ms = timer.elapsed_ms();
  write_results(opt.out, manifest, results);
}

struct MitigateLocalOptions {
  std::string shots;
  std::string calibration;
  std::size_t l = 2;
  std::size_t groups = 300;
  std::string methods = "raw,lsq,ibu";
  std::uint64_t seed = 0;
  std::string out;
};

inline void run_mitigate_local(const MitigateLocalOptions &opt) {
  Timer timer;
  RunManifest manifest;
  manifest.command = "mitigate-local";
  manifest.config = {{"shots", opt.shots}, {"calibration", opt.calibration}, {"l", opt.l},
                     {"groups", opt.groups}, {"methods", opt.methods}, {"seed", opt.seed}};
  manifest.add_input("shots", opt.shots);
  manifest.add_input("calibration", opt.calibration);

  const ShotRecord record = read_shots(opt.shots);
  const ProductChannel channel = read_calibration(opt.calibration);
  note_clamp_warnings(channel, manifest);

  LocalProtocolConfig cfg;
  cfg.l = opt.l;
  cfg.groups = opt.groups;
  cfg.methods = parse_methods(opt.methods);
  cfg.seed = opt.seed;
  const LocalProtocolResult protocol = run_local_protocol(record, channel, cfg);

  json results;
  results["l"] = opt.l;
  results["groups"] = opt.groups;
  json means = json::object();
  for (const auto &[method, mean] : protocol.means) {
    means[to_string(method)] = mean;
  }
  results["means"] = means;
  results["lsq_skipped"] = protocol.lsq_skipped;
  results["ibu_nonconverged"] = protocol.ibu_nonconverged;
  json subgroups = json::array();
  for (const auto &subset : protocol.subgroups) {
    subgroups.push_back(subset.indices());
  }
  results["subgroups"] = subgroups;

  std::vector<TableRow> table;
  table.reserve(cfg.methods.size() * opt.groups);
  for (auto method : cfg.methods) {
    const auto &values = protocol.values.at(method);
    for (std::size_t g = 0; g < values.size(); ++g) {
      table.push_back(TableRow{to_string(method), g, values[g]});
    }
  }
  manifest.duration_ms = timer.elapsed_ms();
  write_results(opt.out, manifest, results, table);
}

struct MitigateStructuralOptions {
  std::string shots;
  std::string calibration;
  std::size_t k = 0;
  std::size_t k_max = 0;  // 0: no sweep
  std::size_t restarts = 10;
  std::size_t max_iter = 500;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  std::string out;
};

inline json em_result_to_json(const EmResult &fit, std::size_t k) {
  return json{{"k", k},
              {"mixture", mixture_to_json(fit.model)},
              {"avg_loglik", fit.avg_loglik},
              {"global_correlation", model_correlation(fit.model)},
              {"iterations", fit.iterations},
              {"restart_index", fit.restart_index},
              {"converged", fit.converged}};
}

inline void run_mitigate_structural(const MitigateStructuralOptions &opt) {
  Timer timer;
  RunManifest manifest;
  manifest.command = "mitigate-structural";
  manifest.config = {{"shots", opt.shots},   {"calibration", opt.calibration},
                     {"k", opt.k},           {"k_max", opt.k_max},
                     {"restarts", opt.restarts}, {"max_iter", opt.max_iter},
                     {"tol", opt.tol},       {"seed", opt.seed}};
  manifest.add_input("shots", opt.shots);
  manifest.add_input("calibration", opt.calibration);

  const ShotRecord record = read_shots(opt.shots);
  const ProductChannel channel = read_calibration(opt.calibration);
  note_clamp_warnings(channel, manifest);

  EmConfig cfg;
  cfg.k = opt.k;
  cfg.restarts = opt.restarts;
  cfg.max_iter = opt.max_iter;
  cfg.tol_loglik = opt.tol;
  cfg.seed = opt.seed;

  json results = em_result_to_json(fit_mixture(record, channel, cfg), opt.k);
  if (opt.k_max > 0) {
    json sweep = json::array();
    std::size_t k = 1;
    for (const auto &fit : sweep_mixture(record, channel, cfg, opt.k_max)) {
      sweep.push_back(em_result_to_json(fit, k++));
    }
    results["sweep"] = sweep;
  }
  manifest.duration_ms = timer.elapsed_ms();
  write_results(opt.out, manifest, results);
}

struct BootstrapOptions {
  std::string shots;
  std::string calibration;
  std::string statistic;
  std::size_t resamples = 190;
  std::size_t size = 2000;
  std::uint64_t seed = 0;
  std::size_t k = 2;
  std::size_t l = 2;
  std::size_t groups = 300;
  std::string method = "ibu";
  std::string out;
};

inline void run_bootstrap(const BootstrapOptions &opt) {
  Timer timer;
  RunManifest manifest;
  manifest.command = "bootstrap";
  manifest.config = {{"shots", opt.shots},     {"calibration", opt.calibration},
                     {"statistic", opt.statistic}, {"resamples", opt.resamples},
                     {"size", opt.size},       {"seed", opt.seed},
                     {"k", opt.k},             {"l", opt.l},
                     {"groups", opt.groups},   {"method", opt.method}};
  manifest.add_input("shots", opt.shots);
  manifest.add_input("calibration", opt.calibration);

  const ShotRecord record = read_shots(opt.shots);
  const ProductChannel channel = read_calibration(opt.calibration);
  note_clamp_warnings(channel, manifest);

  std::function<double(const ShotRecord &)> statistic;
  if (opt.statistic == "structural-cn") {
    EmConfig cfg;
    cfg.k = opt.k;
    cfg.seed = derive_seed(opt.seed, kStreamStatistic);
    statistic = [cfg, &channel](const ShotRecord &resample) {
      return model_correlation(fit_mixture(resample, channel, cfg).model);
    };
  } else if (opt.statistic == "local-cl") {
    LocalProtocolConfig cfg;
    cfg.l = opt.l;
    cfg.groups = opt.groups;
    cfg.methods = {method_from_string(opt.method)};
    cfg.seed = derive_seed(opt.seed, kStreamStatistic);
    statistic = [cfg, &channel](const ShotRecord &resample) {
      return run_local_protocol(resample, channel, cfg).means.begin()->second;
    };
  } else {
    throw ParseError("unknown statistic '" + opt.statistic +
                     "' (expected structural-cn or local-cl)");
  }

  BootstrapConfig cfg;
  cfg.resamples = opt.resamples;
  cfg.resample_size = opt.size;
  cfg.seed = derive_seed(opt.seed, kStreamBootstrap);
  const BootstrapResult bootstrap = bootstrap_statistic(record, cfg, statistic);

  json results;
  results["statistic"] = opt.statistic;
  results["resamples"] = opt.resamples;
  results["resample_size"] = opt.size;
  results["mean"] = bootstrap.mean;
  results["stddev"] = bootstrap.stddev;

  std::vector<TableRow> table;
  table.reserve(bootstrap.values.size());
  for (std::size_t b = 0; b < bootstrap.values.size(); ++b) {
    table.push_back(TableRow{opt.statistic, b, bootstrap.values[b]});
  }
  manifest.duration_ms = timer.elapsed_ms();
  write_results(opt.out, manifest, results, table);
}

struct OracleOptions {
  std::string mode;
  std::string shots;
  std::string calibration;
  double grid_step = 1e-3;
  std::size_t k = 1;
  std::string out;
};

inline void run_oracle(const OracleOptions &opt) {
  Timer timer;
  RunManifest manifest;
  manifest.command = "oracle";
  manifest.config = {{"mode", opt.mode},         {"shots", opt.shots},
                     {"calibration", opt.calibration}, {"grid_step", opt.grid_step},
                     {"k", opt.k}};
  manifest.add_input("shots", opt.shots);
  manifest.add_input("calibration", opt.calibration);

  const ShotRecord record = read_shots(opt.shots);
  const ProductChannel channel = read_calibration(opt.calibration);
  note_clamp_warnings(channel, manifest);

  json results;
  results["mode"] = opt.mode;
  if (opt.mode == "lre-grid") {
    const LreOracleResult oracle =
        brute_force_lre(empirical_distribution(record), channel, opt.grid_step);
    results["objective"] = oracle.objective;
    results["distribution"] = distribution_to_json(oracle.q);
  } else if (opt.mode == "mixture-enum") {
    const MixtureOracleResult oracle = brute_force_mixture(record, channel, opt.k);
    results["avg_loglik"] = oracle.avg_loglik;
    results["mixture"] = mixture_to_json(oracle.model);
  } else {
    throw ParseError("unknown mode '" + opt.mode + "' (expected lre-grid or mixture-enum)");
  }
  manifest.duration_ms = timer.elapsed_ms();
  write_results(opt.out, manifest, results);
}

}  // namespace detail

/// Parses and runs one command. args excludes the program name.
inline int dispatch(std::vector<std::string> args) {
  CLI::App app{"Readout error mitigation for bitstring measurement records"};
  app.require_subcommand(1);

  detail::SimulateOptions sim;
  CLI::App *sim_cmd =
      app.add_subcommand("simulate", "Generate synthetic shots and a calibration file");
  sim_cmd->add_option("--n", sim.n, "Qubit count")->required();
  sim_cmd->add_option("--truth", sim.truth, "'ghz' or a distribution JSON file")
      ->capture_default_str();
  sim_cmd->add_option("--rates", sim.rates, "Per-qubit flip rate range LOW,HIGH")->required();
  sim_cmd->add_option("--shots", sim.shots, "Number of shots to sample")->required();
  sim_cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "Output prefix (writes <out>_shots.txt, "
                                        "<out>_calibration.json, <out>_manifest.json)")
      ->required();

  detail::MitigateFullOptions full;
  CLI::App *full_cmd =
      app.add_subcommand("mitigate-full", "Mitigate the full distribution (small n)");
  full_cmd->add_option("--shots", full.shots, "Shots file (.txt or .json)")->required();
  full_cmd->add_option("--calibration", full.calibration, "Calibration JSON file")->required();
  full_cmd->add_option("--method", full.method, "lsq or ibu")->capture_default_str();
  full_cmd->add_option("--max-iter", full.max_iter, "IBU iteration budget")
      ->capture_default_str();
  full_cmd->add_option("--tol", full.tol, "IBU successive-iterate L1 tolerance")
      ->capture_default_str();
  full_cmd->add_option("--init", full.init, "IBU initialization: uniform or empirical")
      ->capture_default_str();
  full_cmd->add_option("--out", full.out, "Results JSON path")->required();

  detail::MitigateLocalOptions local;
  CLI::App *local_cmd = app.add_subcommand(
      "mitigate-local", "Mitigate random l-bit subgroups and average the local correlation");
  local_cmd->add_option("--shots", local.shots, "Shots file (.txt or .json)")->required();
  local_cmd->add_option("--calibration", local.calibration, "Calibration JSON file")->required();
  local_cmd->add_option("--l", local.l, "Subgroup size")->required();
  local_cmd->add_option("--groups", local.groups, "Number of random subgroups")
      ->capture_default_str();
  local_cmd->add_option("--methods", local.methods, "Comma list from raw,lsq,ibu")
      ->capture_default_str();
  local_cmd->add_option("--seed", local.seed, "Random seed")->capture_default_str();
  local_cmd->add_option("--out", local.out, "Results JSON path (CSV mirror alongside)")
      ->required();

  detail::MitigateStructuralOptions structural;
  CLI::App *structural_cmd = app.add_subcommand(
      "mitigate-structural", "Recover K hidden bitstrings and weights by mixture EM");
  structural_cmd->add_option("--shots", structural.shots, "Shots file (.txt or .json)")
      ->required();
  structural_cmd->add_option("--calibration", structural.calibration, "Calibration JSON file")
      ->required();
  structural_cmd->add_option("--k", structural.k, "Number of mixture components")->required();
  structural_cmd->add_option("--k-max", structural.k_max,
                             "Also sweep K = 1..k-max and report likelihood per K")
      ->capture_default_str();
  structural_cmd->add_option("--restarts", structural.restarts, "Random EM restarts")
      ->capture_default_str();
  structural_cmd->add_option("--max-iter", structural.max_iter, "EM iteration budget")
      ->capture_default_str();
  structural_cmd->add_option("--tol", structural.tol, "EM log-likelihood tolerance")
      ->capture_default_str();
  structural_cmd->add_option("--seed", structural.seed, "Random seed")->capture_default_str();
  structural_cmd->add_option("--out", structural.out, "Results JSON path")->required();

  detail::BootstrapOptions boot;
  CLI::App *boot_cmd =
      app.add_subcommand("bootstrap", "Resample the record and report a statistic's spread");
  boot_cmd->add_option("--shots", boot.shots, "Shots file (.txt or .json)")->required();
  boot_cmd->add_option("--calibration", boot.calibration, "Calibration JSON file")->required();
  boot_cmd->add_option("--statistic", boot.statistic, "structural-cn or local-cl")->required();
  boot_cmd->add_option("--resamples", boot.resamples, "Number of bootstrap resamples")
      ->capture_default_str();
  boot_cmd->add_option("--size", boot.size, "Shots per resample")->capture_default_str();
  boot_cmd->add_option("--seed", boot.seed, "Random seed")->capture_default_str();
  boot_cmd->add_option("--k", boot.k, "Components for structural-cn")->capture_default_str();
  boot_cmd->add_option("--l", boot.l, "Subgroup size for local-cl")->capture_default_str();
  boot_cmd->add_option("--groups", boot.groups, "Subgroups for local-cl")
      ->capture_default_str();
  boot_cmd->add_option("--method", boot.method, "Mitigation method for local-cl")
      ->capture_default_str();
  boot_cmd->add_option("--out", boot.out, "Results JSON path (CSV mirror alongside)")
      ->required();

  detail::OracleOptions oracle;
  CLI::App *oracle_cmd =
      app.add_subcommand("oracle", "Brute-force reference solvers for tiny instances");
  oracle_cmd->add_option("--mode", oracle.mode, "lre-grid or mixture-enum")->required();
  oracle_cmd->add_option("--shots", oracle.shots, "Shots file (.txt or .json)")->required();
  oracle_cmd->add_option("--calibration", oracle.calibration, "Calibration JSON file")
      ->required();
  oracle_cmd->add_option("--grid-step", oracle.grid_step, "Simplex grid step for lre-grid")
      ->capture_default_str();
  oracle_cmd->add_option("--k", oracle.k, "Components for mixture-enum (1 or 2)")
      ->capture_default_str();
  oracle_cmd->add_option("--out", oracle.out, "Results JSON path")->required();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim_cmd->parsed()) {
      detail::run_simulate(sim);
    } else if (full_cmd->parsed()) {
      detail::run_mitigate_full(full);
    } else if (local_cmd->parsed()) {
      detail::run_mitigate_local(local);
    } else if (structural_cmd->parsed()) {
      detail::run_mitigate_structural(structural);
    } else if (boot_cmd->parsed()) {
      detail::run_bootstrap(boot);
    } else if (oracle_cmd->parsed()) {
      detail::run_oracle(oracle);
    }
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace qrem::cli

#endif
