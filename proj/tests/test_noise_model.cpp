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
#include "qrem/distribution.hpp"
#include "qrem/noise_model.hpp"
#include "qrem/synthetic.hpp"

using namespace qrem;
using qrem::test::explicit_channel_matrix;
using qrem::test::l1_distance;
using qrem::test::random_channel;
using qrem::test::random_simplex_dist;
using qrem::test::random_sparse_dist;

namespace {

ProductChannel symmetric_channel(std::size_t n, double rate) {
  std::vector<QubitChannel> qubits(n, QubitChannel{rate, rate});
  return ProductChannel::from_rates(std::move(qubits));
}

}  // namespace

TEST_CASE("channel entry: identity, products, single qubit") {
  const auto noiseless = ProductChannel::noiseless(3);
  for (std::uint64_t i = 0; i < 8; ++i) {
    for (std::uint64_t j = 0; j < 8; ++j) {
      const double value = channel_entry(noiseless, Bitstring::from_index(i, 3),
                                         Bitstring::from_index(j, 3));
      CHECK(value == (i == j ? 1.0 : 0.0));
    }
  }

  const auto two = symmetric_channel(2, 0.1);
  CHECK(channel_entry(two, Bitstring::from_text("00"), Bitstring::from_text("01")) ==
        doctest::Approx(0.09).epsilon(1e-15));

  const auto one = ProductChannel::from_rates({QubitChannel{0.1, 0.0}});
  CHECK(channel_entry(one, Bitstring::from_text("1"), Bitstring::from_text("0")) ==
        doctest::Approx(0.1).epsilon(1e-15));
  CHECK_THROWS_AS(channel_entry(one, Bitstring::from_text("11"), Bitstring::from_text("0")),
                  std::invalid_argument);
}

TEST_CASE("log channel entry uses clamped rates and matches the product form") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.next_below(8);
    const auto ch = random_channel(n, 0.02, 0.4, rng);
    Bitstring s(n), xi(n);
    for (std::size_t k = 0; k < n; ++k) {
      s.set_bit(k, static_cast<int>(rng.next_u64() & 1u));
      xi.set_bit(k, static_cast<int>(rng.next_u64() & 1u));
    }
    CHECK(std::exp(log_channel_entry(ch, s, xi)) ==
          doctest::Approx(channel_entry(ch, s, xi)).epsilon(1e-12));
  }

  const auto noiseless = ProductChannel::noiseless(3);
  const double diag = log_channel_entry(noiseless, Bitstring::zeros(3), Bitstring::zeros(3));
  CHECK(diag <= 0.0);
  CHECK(diag >= 3.0 * std::log(1.0 - 1e-9));

  const auto one = ProductChannel::from_rates({QubitChannel{0.1, 0.1}});
  CHECK(log_channel_entry(one, Bitstring::from_text("1"), Bitstring::from_text("0")) ==
        doctest::Approx(std::log(0.1)).epsilon(1e-15));
}

TEST_CASE("apply_forward: identity, hand value, probability preservation") {
  Rng rng(5);
  const auto dist = random_sparse_dist(4, 5, rng);
  CHECK(l1_distance(apply_forward(ProductChannel::noiseless(4), dist), dist) == 0.0);

  std::map<Bitstring, double> weights;
  weights[Bitstring::from_text("0")] = 0.9;
  weights[Bitstring::from_text("1")] = 0.1;
  const auto q = SparseDistribution::probability(1, weights);
  const auto p = apply_forward(symmetric_channel(1, 0.1), q);
  CHECK(p.weight(Bitstring::from_text("0")) == doctest::Approx(0.82).epsilon(1e-15));
  CHECK(p.weight(Bitstring::from_text("1")) == doctest::Approx(0.18).epsilon(1e-15));

  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + rng.next_below(8);
    const auto ch = random_channel(n, 0.0, 0.3, rng);
    const auto image = apply_forward(ch, random_simplex_dist(n, rng));
    CHECK(image.mode() == NormalizationMode::probability);
    CHECK(image.min_weight() >= 0.0);
    CHECK(std::abs(image.total_weight() - 1.0) < 1e-12);
  }
}

TEST_CASE("marginal-channel commutation: marginalize after forward equals local forward") {
  Rng rng(13);
  const auto ch = random_channel(6, 0.01, 0.2, rng);
  const auto q = random_sparse_dist(6, 8, rng);
  const BitSubset subset = BitSubset::of({2, 5});
  const auto left = marginalize(apply_forward(ch, q), subset);
  const auto right = apply_forward(ch.restricted(subset), marginalize(q, subset));
  CHECK(l1_distance(left, right) < 1e-12);
}

TEST_CASE("apply_inverse: hand 2x2 values, negativity, identity, round trip") {
  const auto one = symmetric_channel(1, 0.1);
  std::map<Bitstring, double> pw;
  pw[Bitstring::from_text("0")] = 0.82;
  pw[Bitstring::from_text("1")] = 0.18;
  const auto q = apply_inverse(one, SparseDistribution::probability(1, pw));
  CHECK(q.mode() == NormalizationMode::quasi);
  CHECK(q.weight(Bitstring::from_text("0")) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(q.weight(Bitstring::from_text("1")) == doctest::Approx(0.1).epsilon(1e-12));

  const auto vertex = apply_inverse(one, SparseDistribution::point_mass(Bitstring::from_text("0")));
  CHECK(vertex.weight(Bitstring::from_text("0")) == doctest::Approx(1.125).epsilon(1e-14));
  CHECK(vertex.weight(Bitstring::from_text("1")) == doctest::Approx(-0.125).epsilon(1e-14));

  Rng rng(31);
  const auto dist = random_sparse_dist(3, 4, rng);
  CHECK(l1_distance(apply_inverse(ProductChannel::noiseless(3), dist), dist) == 0.0);

  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + rng.next_below(10);
    const auto ch = random_channel(n, 0.0, 0.3, rng);
    const auto p = random_simplex_dist(n, rng);
    const auto round = apply_forward(ch, apply_inverse(ch, p));
    CHECK(l1_distance(round, p) < 1e-9);
  }
}

TEST_CASE("apply_inverse rejects singular per-qubit matrices") {
  const auto singular = ProductChannel::from_rates({QubitChannel{0.5, 0.5}});
  CHECK_THROWS_AS(apply_inverse(singular, SparseDistribution::point_mass(Bitstring::from_text("0"))),
                  SingularChannelError);
  const auto nearly = ProductChannel::from_rates({QubitChannel{0.3, 0.7 - 1e-13}});
  CHECK_THROWS_AS(apply_inverse(nearly, SparseDistribution::point_mass(Bitstring::from_text("0"))),
                  SingularChannelError);
}

TEST_CASE("explicit channel matrix is column stochastic for n <= 3") {
  Rng rng(19);
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto ch = random_channel(n, 0.0, 0.45, rng);
    const auto matrix = explicit_channel_matrix(ch);
    const std::size_t dim = std::size_t{1} << n;
    for (std::size_t col = 0; col < dim; ++col) {
      double sum = 0.0;
      for (std::size_t row = 0; row < dim; ++row) {
        sum += matrix[row][col];
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("Kronecker-structured inverse equals the tensor product of 2x2 inverses") {
  Rng rng(37);
  const std::size_t n = 3;
  const auto ch = random_channel(n, 0.02, 0.3, rng);
  const std::size_t dim = std::size_t{1} << n;
  // Explicit inverse entries: product over qubits of per-qubit 2x2 inverses.
  auto inverse_entry = [&](std::size_t xi, std::size_t s) {
    double value = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto &q = ch.qubit(k);
      const double det = q.determinant();
      const int xb = (xi >> (n - 1 - k)) & 1;
      const int sb = (s >> (n - 1 - k)) & 1;
      double entry;
      if (xb == 0 && sb == 0) {
        entry = (1.0 - q.r0_given_1) / det;
      } else if (xb == 0 && sb == 1) {
        entry = -q.r0_given_1 / det;
      } else if (xb == 1 && sb == 0) {
        entry = -q.r1_given_0 / det;
      } else {
        entry = (1.0 - q.r1_given_0) / det;
      }
      value *= entry;
    }
    return value;
  };
  for (std::size_t s = 0; s < dim; ++s) {
    const auto basis = SparseDistribution::point_mass(Bitstring::from_index(s, n));
    const auto inverted = apply_inverse(ch, basis);
    for (std::size_t xi = 0; xi < dim; ++xi) {
      CHECK(inverted.weight(Bitstring::from_index(xi, n)) ==
            doctest::Approx(inverse_entry(xi, s)).epsilon(1e-10));
    }
  }
}

TEST_CASE("sampling: noiseless point mass, determinism, per-bit flip fraction") {
  const auto point = SparseDistribution::point_mass(Bitstring::from_text("0101"));
  const auto record = sample_noisy_shots(ProductChannel::noiseless(4), point, 50, 3);
  for (const auto &shot : record.shots) {
    CHECK(shot.to_text() == "0101");
  }

  const auto truth = make_ghz_truth(6, 0.5);
  const auto ch = symmetric_channel(6, 0.1);
  const auto a = sample_noisy_shots(ch, truth, 500, 42);
  const auto b = sample_noisy_shots(ch, truth, 500, 42);
  for (std::size_t i = 0; i < a.shots.size(); ++i) {
    CHECK(a.shots[i] == b.shots[i]);
  }

  const auto ones = SparseDistribution::point_mass(Bitstring::ones(20));
  const auto flips = sample_noisy_shots(symmetric_channel(20, 0.05), ones, 10000, 8);
  for (std::size_t k = 0; k < 20; ++k) {
    std::size_t count = 0;
    for (const auto &shot : flips.shots) {
      count += static_cast<std::size_t>(shot.bit(k));
    }
    const double fraction = static_cast<double>(count) / 10000.0;
    CHECK(fraction > 0.94);
    CHECK(fraction < 0.96);
  }

  CHECK_THROWS_AS(sample_noisy_shots(ch, truth, 0, 1), std::invalid_argument);
}

TEST_CASE("calibration loading: echo, clamping with warning, validation") {
  const auto echo = load_calibration({QubitChannel{0.01, 0.02}, QubitChannel{0.03, 0.04}});
  CHECK(echo.qubit_count() == 2);
  CHECK(echo.qubit(0).r1_given_0 == 0.01);
  CHECK(echo.qubit(1).r0_given_1 == 0.04);
  CHECK(echo.clamped_qubits().empty());

  const auto clamped = load_calibration({QubitChannel{0.0, 0.02}});
  CHECK(clamped.qubit(0).r1_given_0 == kRateClampEpsilon);
  CHECK(clamped.clamped_qubits() == std::vector<std::size_t>{0});

  CHECK_THROWS_AS(load_calibration({QubitChannel{1.2, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(load_calibration({}), std::invalid_argument);
}

TEST_CASE("dense limit is enforced for forward application") {
  Rng rng(2);
  const auto dist = random_sparse_dist(30, 3, rng);
  const auto ch = ProductChannel::noiseless(30);
  CHECK_THROWS_AS(apply_forward(ch, dist), std::invalid_argument);
}
