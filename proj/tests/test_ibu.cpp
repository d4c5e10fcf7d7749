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

#include <doctest.h>

#include <cmath>
#include <map>

#include "helpers.hpp"
#include "qrem/ibu.hpp"
#include "qrem/least_squares.hpp"
#include "qrem/noise_model.hpp"
#include "qrem/synthetic.hpp"

using namespace qrem;
using qrem::test::l1_distance;
using qrem::test::random_channel;
using qrem::test::random_simplex_dist;

namespace {

SparseDistribution uniform_dist(std::size_t n) {
  const std::size_t dim = std::size_t{1} << n;
  std::map<Bitstring, double> weights;
  for (std::size_t i = 0; i < dim; ++i) {
    weights.emplace(Bitstring::from_index(i, n), 1.0 / static_cast<double>(dim));
  }
  return SparseDistribution::probability(n, std::move(weights));
}

}  // namespace

TEST_CASE("one update from uniform matches the hand-evaluated value") {
  const auto ch = ProductChannel::from_rates({QubitChannel{0.1, 0.1}});
  std::map<Bitstring, double> pw;
  pw[Bitstring::from_text("0")] = 0.82;
  pw[Bitstring::from_text("1")] = 0.18;
  const auto p = SparseDistribution::probability(1, pw);
  const auto next = ibu_step(p, ch, uniform_dist(1));
  // 0.5 * (0.82*0.9/0.5 + 0.18*0.1/0.5) = 0.756
  CHECK(next.weight(Bitstring::from_text("0")) == doctest::Approx(0.756).epsilon(1e-12));
  CHECK(next.weight(Bitstring::from_text("1")) == doctest::Approx(0.244).epsilon(1e-12));
}

TEST_CASE("the exact preimage is a fixed point of the update") {
  Rng rng(19);
  const auto ch = random_channel(3, 0.02, 0.25, rng);
  const auto truth = random_simplex_dist(3, rng);
  const auto p = apply_forward(ch, truth);
  const auto stepped = ibu_step(p, ch, truth);
  CHECK(l1_distance(stepped, truth) < 1e-12);
}

TEST_CASE("noiseless channel: one update from full support returns the observation") {
  Rng rng(3);
  const auto p = random_simplex_dist(3, rng);
  const auto stepped = ibu_step(p, ProductChannel::noiseless(3), uniform_dist(3));
  CHECK(l1_distance(stepped, p) < 1e-12);
}

TEST_CASE("update preserves normalization and the support of the previous iterate") {
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.next_below(4);
    const auto ch = random_channel(n, 0.01, 0.3, rng);
    const auto p = random_simplex_dist(n, rng);
    const auto prev = qrem::test::random_sparse_dist(n, 1 + rng.next_below(1 << n), rng);
    const auto next = ibu_step(p, ch, prev);
    CHECK(std::abs(next.total_weight() - 1.0) < 1e-12);
    CHECK(next.min_weight() >= 0.0);
    for (const auto &[bits, w] : next.weights()) {
      CHECK(prev.weight(bits) > 0.0);  // support never grows
    }
  }
}

TEST_CASE("vertex images are recovered after convergence") {
  Rng rng(11);
  const auto ch = random_channel(4, 0.03, 0.15, rng);
  const auto vertex = SparseDistribution::point_mass(Bitstring::from_text("0000"));
  const auto p = apply_forward(ch, vertex);
  IbuConfig cfg;
  cfg.max_iter = 2000000;
  cfg.tol_l1 = 1e-14;
  const auto result = mitigate_full_ibu(p, ch, cfg);
  CHECK(l1_distance(result.q, vertex) < 1e-6);
}

TEST_CASE("consistent observations: converged estimate agrees with LSQ and truth") {
  Rng rng(59);
  const auto ch = random_channel(4, 0.02, 0.2, rng);
  const auto truth = random_simplex_dist(4, rng);
  const auto p = apply_forward(ch, truth);
  IbuConfig cfg;
  cfg.max_iter = 100000;
  cfg.tol_l1 = 1e-13;
  const auto ibu = mitigate_full_ibu(p, ch, cfg);
  const auto lsq = mitigate_full_lsq(p, ch);
  CHECK(l1_distance(ibu.q, lsq.q) < 1e-4);
  CHECK(l1_distance(ibu.q, truth) < 1e-4);
}

TEST_CASE("iteration budget contract: zero rejected, one gives exactly one step") {
  Rng rng(83);
  const auto ch = random_channel(2, 0.05, 0.2, rng);
  const auto p = random_simplex_dist(2, rng);
  IbuConfig zero;
  zero.max_iter = 0;
  CHECK_THROWS_AS(mitigate_full_ibu(p, ch, zero), std::invalid_argument);

  IbuConfig one;
  one.max_iter = 1;
  const auto result = mitigate_full_ibu(p, ch, one);
  CHECK(result.iterations == 1);
  CHECK(l1_distance(result.q, ibu_step(p, ch, uniform_dist(2))) < 1e-15);
}

TEST_CASE("objective trace is non-increasing on random instances") {
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.next_below(4);
    const auto ch = random_channel(n, 0.01, 0.3, rng);
    const auto p = random_simplex_dist(n, rng);
    IbuConfig cfg;
    cfg.max_iter = 100;
    cfg.track_objective = true;
    const auto result = mitigate_full_ibu(p, ch, cfg);
    REQUIRE(result.objective_trace.size() >= 2);
    for (std::size_t i = 1; i < result.objective_trace.size(); ++i) {
      CHECK(result.objective_trace[i] <= result.objective_trace[i - 1] + 1e-12);
    }
  }
}

TEST_CASE("iterates started positive stay positive everywhere") {
  Rng rng(21);
  const auto ch = random_channel(3, 0.02, 0.3, rng);
  const auto p = random_simplex_dist(3, rng);
  IbuConfig cfg;
  cfg.max_iter = 50;
  cfg.tol_l1 = 1e-300;  // force the full budget
  const auto result = mitigate_full_ibu(p, ch, cfg);
  CHECK(result.q.support_size() == 8);
  CHECK(result.q.min_weight() > 0.0);
}

TEST_CASE("empirical and custom initialization modes") {
  Rng rng(91);
  const auto ch = random_channel(3, 0.02, 0.2, rng);
  const auto truth = random_simplex_dist(3, rng);
  const auto p = apply_forward(ch, truth);

  IbuConfig cfg;
  cfg.init = IbuConfig::Init::empirical;
  cfg.max_iter = 20000;
  const auto from_empirical = mitigate_full_ibu(p, ch, cfg);
  CHECK(l1_distance(from_empirical.q, truth) < 1e-3);

  IbuConfig custom;
  custom.init = IbuConfig::Init::custom;
  custom.custom_init = uniform_dist(3);
  custom.max_iter = 20000;
  const auto from_custom = mitigate_full_ibu(p, ch, custom);
  CHECK(l1_distance(from_custom.q, truth) < 1e-3);

  IbuConfig missing;
  missing.init = IbuConfig::Init::custom;
  CHECK_THROWS_AS(mitigate_full_ibu(p, ch, missing), std::invalid_argument);
}

TEST_CASE("marginal unfolding: full-subset consistency and the exact GHZ marginal") {
  Rng rng(111);
  const auto ch = random_channel(3, 0.02, 0.15, rng);
  const auto truth = random_simplex_dist(3, rng);
  const auto record = sample_noisy_shots(ch, truth, 1500, 7);
  IbuConfig cfg;
  cfg.max_iter = 3000;
  const auto marginal = mitigate_marginal_ibu(record, ch, BitSubset::full(3), cfg);
  const auto full = mitigate_full_ibu(empirical_distribution(record), ch, cfg);
  CHECK(l1_distance(marginal.q, full.q) < 1e-12);

  std::map<Bitstring, double> pw;
  pw[Bitstring::from_text("00")] = 0.4525;
  pw[Bitstring::from_text("01")] = 0.0475;
  pw[Bitstring::from_text("10")] = 0.0475;
  pw[Bitstring::from_text("11")] = 0.4525;
  const auto p = SparseDistribution::probability(2, pw);
  const auto two = ProductChannel::from_rates({QubitChannel{0.05, 0.05}, QubitChannel{0.05, 0.05}});
  IbuConfig tight;
  tight.max_iter = 2000000;
  tight.tol_l1 = 1e-14;
  const auto unfolded = mitigate_full_ibu(p, two, tight);
  CHECK(unfolded.q.weight(Bitstring::from_text("00")) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(unfolded.q.weight(Bitstring::from_text("11")) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("objective evaluation: exact preimage, noiseless reduction") {
  Rng rng(13);
  const auto ch = random_channel(3, 0.02, 0.25, rng);
  const auto truth = random_simplex_dist(3, rng);
  const auto p = apply_forward(ch, truth);
  CHECK(lre_objective(p, ch, truth) <= 1e-14);

  const auto q = random_simplex_dist(3, rng);
  const auto p2 = random_simplex_dist(3, rng);
  CHECK(lre_objective(p2, ProductChannel::noiseless(3), q) ==
        doctest::Approx(relative_entropy(p2, q)).epsilon(1e-13));
}

TEST_CASE("infeasible support: exact-zero channels raise, clamped ones cannot") {
  const auto exact_zero = ProductChannel::noiseless(1);
  const auto p = SparseDistribution::point_mass(Bitstring::from_text("1"));
  const auto prev = SparseDistribution::point_mass(Bitstring::from_text("0"));
  CHECK_THROWS_AS(ibu_step(p, exact_zero, prev), InfeasibleSupportError);

  const auto clamped = load_calibration({QubitChannel{0.0, 0.0}});
  CHECK_NOTHROW(ibu_step(p, clamped, prev));
}

TEST_CASE("non-convergence is a flag, not an exception") {
  Rng rng(121);
  const auto ch = random_channel(3, 0.05, 0.3, rng);
  const auto p = random_simplex_dist(3, rng);
  IbuConfig cfg;
  cfg.max_iter = 2;
  cfg.tol_l1 = 1e-300;
  const auto result = mitigate_full_ibu(p, ch, cfg);
  CHECK_FALSE(result.converged);
  CHECK(result.iterations == 2);
}
