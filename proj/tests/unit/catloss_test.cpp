// Copyright 2026 The purify Authors
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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "purify/catloss.hpp"

using namespace purify;
using namespace purify::cat;
using Catch::Matchers::WithinAbs;

namespace {

// Eigenvalues of the cat mixture computed in the non-orthogonal pair
// {|alpha>, |-alpha>}: rho = sum C_ij |v_i><v_j| with Gram matrix G has the
// spectrum of G^(1/2) C G^(1/2).
std::pair<double, double> gram_eigenvalues(double r, double e) {
  Eigen::Matrix2d gram;
  gram << 1.0, e, e, 1.0;
  Eigen::Matrix2d coeff;
  coeff << 1.0, r, r, 1.0;
  coeff /= 2.0 * (1.0 + r * e);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> g(gram);
  const Eigen::Matrix2d root = g.eigenvectors() *
                               g.eigenvalues().cwiseSqrt().asDiagonal() *
                               g.eigenvectors().transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> s(root * coeff * root);
  return {s.eigenvalues()(1), s.eigenvalues()(0)};
}

}  // namespace

TEST_CASE("cat eigensystem", "[catloss]") {
  CatMixture cat{{{1.0, 0.5}}, 1.0};
  auto [p0, p1] = cat_eigensystem(cat);
  CHECK_THAT(p0, WithinAbs(1.0, 1e-15));
  CHECK_THAT(p1, WithinAbs(0.0, 1e-15));

  cat = {{{20.0, 0.0}}, 0.0};
  std::tie(p0, p1) = cat_eigensystem(cat);
  CHECK_THAT(p0, WithinAbs(0.5, 1e-15));
  CHECK_THAT(p1, WithinAbs(0.5, 1e-15));

  // |alpha|^2 = 2 split over two modes, r = 0.5.
  cat = {{{1.0, 0.0}, {0.0, 1.0}}, 0.5};
  CHECK_THAT(cat.overlap(), WithinAbs(std::exp(-4.0), 1e-16));
  std::tie(p0, p1) = cat_eigensystem(cat);
  const auto [g0, g1] = gram_eigenvalues(0.5, std::exp(-4.0));
  CHECK_THAT(p0, WithinAbs(g0, 1e-14));
  CHECK_THAT(p1, WithinAbs(g1, 1e-14));
  CHECK_THAT(p0, WithinAbs(0.7568060361332352, 1e-14));

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(1e-6, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double r = u(rng), e = pos(rng);
    const auto [a, b] = eigenvalues(r, e);
    REQUIRE(a >= 0.0);
    REQUIRE(b >= 0.0);
    REQUIRE(std::abs(a + b - 1.0) < 1e-14);
    const auto [ga, gb] = gram_eigenvalues(r, e);
    // The Gram route orders by size; compare as sets.
    REQUIRE(std::abs(std::max(a, b) - ga) < 1e-12);
    REQUIRE(std::abs(std::min(a, b) - gb) < 1e-12);
  }
  CHECK_THROWS_AS(cat_eigensystem(CatMixture{{{1.0, 0.0}}, 1.5}), std::invalid_argument);
}

TEST_CASE("to_mixture and its inverse", "[catloss]") {
  CHECK(to_mixture(CatMixture{{{2.0, 0.0}}, 1.0}) == MixtureState({1.0, 0.0}));
  const auto half = to_mixture(CatMixture{{{30.0, 0.0}}, 0.0});
  CHECK_THAT(half[0], WithinAbs(0.5, 1e-15));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.999, 0.999), amp(0.1, 2.0);
  for (int i = 0; i < 500; ++i) {
    const CatMixture cat{{{amp(rng), amp(rng)}}, u(rng)};
    const double back = purity_from_mixture(to_mixture(cat), cat.overlap());
    REQUIRE(std::abs(back - cat.r) < 1e-12);
  }
}

TEST_CASE("decohere", "[catloss]") {
  const CatMixture cat{{{1.0, 0.0}}, 0.8};
  const LossChannel still{{1.0}, 1.0, 0.0};
  CHECK(decohere(cat, still, false).r == cat.r);
  CHECK(decohere(cat, still, true).r == cat.r);
  const LossChannel lossless{{0.0}, 1.0, 5.0};
  CHECK(decohere(cat, lossless, false).r == cat.r);
  CHECK(decohere(cat, lossless, false).alphas == cat.alphas);

  const LossChannel short_hop{{1.0}, 1.0, 0.1};
  const auto exact = decohere(cat, short_hop, false);
  const auto approx = decohere(cat, short_hop, true);
  CHECK_THAT(exact.r / cat.r, WithinAbs(0.6959075250073145, 1e-14));
  CHECK_THAT(approx.r / cat.r, WithinAbs(0.6703200460356393, 1e-14));
  CHECK_THAT(std::abs(exact.alphas[0]), WithinAbs(std::exp(-0.1), 1e-15));
  CHECK(approx.alphas == cat.alphas);
  CHECK_THAT(feedback_efficiency_from_channel(cat, short_hop, false),
             WithinAbs(0.6959075250073145, 1e-14));

  CHECK_THROWS_AS(decohere(cat, LossChannel{{-1.0}, 1.0, 1.0}, false), std::invalid_argument);
  CHECK_THROWS_AS(decohere(cat, LossChannel{{1.0, 1.0}, 1.0, 1.0}, false),
                  std::invalid_argument);
}

TEST_CASE("decohere never increases |r| or |alpha_j|", "[catloss][property]") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    const CatMixture cat{{{u(rng), u(rng)}, {u(rng), u(rng)}}, u(rng)};
    const LossChannel ch{{pos(rng), pos(rng)}, 0.5 + pos(rng), pos(rng)};
    for (bool approx : {false, true}) {
      const auto out = decohere(cat, ch, approx);
      REQUIRE(std::abs(out.r) <= std::abs(cat.r));
      for (std::size_t j = 0; j < 2; ++j) {
        REQUIRE(std::abs(out.alphas[j]) <= std::abs(cat.alphas[j]));
      }
    }
  }
}

TEST_CASE("purity_step", "[catloss]") {
  const FeedbackModel ideal{1.0, false};
  for (double r : {0.1, 0.5, 0.9}) {
    CHECK_THAT(purity_step(r, r, BinaryEvent::kZero, ideal), WithinAbs(2 * r / (1 + r * r), 1e-15));
    CHECK_THAT(purity_step(r, r, BinaryEvent::kNotZero, FeedbackModel{0.7, false}),
               WithinAbs(0.0, 1e-15));
  }
  CHECK_THAT(purity_step(0.4, 0.0, BinaryEvent::kZero, FeedbackModel{0.7, false}),
             WithinAbs(0.28, 1e-15));
  CHECK_THROWS_AS(purity_step(1.0, 1.0, BinaryEvent::kNotZero, ideal), std::domain_error);
  CHECK_THROWS_AS(purity_step(0.5, 0.5, BinaryEvent::kZero, FeedbackModel{1.5, false}),
                  std::invalid_argument);

  SECTION("exact mode reduces to the mesoscopic recursion as e -> 0") {
    for (double R = -0.95; R <= 0.95; R += 0.05) {
      for (double r = -0.95; r <= 0.95; r += 0.05) {
        for (auto ev : {BinaryEvent::kZero, BinaryEvent::kNotZero}) {
          const double meso = purity_step(R, r, ev, FeedbackModel{0.9, false});
          const double exact = purity_step(R, r, ev, FeedbackModel{0.9, true}, 1e-13);
          REQUIRE(std::abs(meso - exact) < 1e-10);
        }
      }
    }
  }
  SECTION("exact mode matches the engine on the e-dependent eigenvalues") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.95, 0.95), pos(0.01, 0.9);
    for (int i = 0; i < 500; ++i) {
      const double R = u(rng), r = u(rng), e = pos(rng);
      const auto [a0, a1] = eigenvalues(R, e);
      const auto [b0, b1] = eigenvalues(r, e);
      for (auto ev : {BinaryEvent::kZero, BinaryEvent::kNotZero}) {
        const auto next = binary_step(MixtureState::normalized({a0, a1}),
                                      MixtureState::normalized({b0, b1}), ev);
        const double expected = purity_from_mixture(next, e);
        REQUIRE(std::abs(purity_step(R, r, ev, FeedbackModel{1.0, true}, e) - expected) < 1e-10);
      }
    }
  }
}

TEST_CASE("mesoscopic recursion agrees with the core engine", "[catloss][property]") {
  for (double R = -0.95; R <= 0.951; R += 0.05) {
    for (double r = -0.95; r <= 0.951; r += 0.05) {
      const MixtureState state({(1 + R) / 2, (1 - R) / 2});
      const MixtureState source({(1 + r) / 2, (1 - r) / 2});
      for (auto ev : {BinaryEvent::kZero, BinaryEvent::kNotZero}) {
        const auto next = binary_step(state, source, ev);
        REQUIRE(std::abs(purity_step(R, r, ev, FeedbackModel{1.0, false}) -
                         (next[0] - next[1])) < 1e-12);
      }
      REQUIRE(std::abs(binary_event_prob_cat(R, r, 0.0) - binary_outcome_prob(state, source)) <
              1e-15);
    }
  }
}

TEST_CASE("binary_event_prob_cat", "[catloss]") {
  CHECK_THAT(binary_event_prob_cat(0, 0, 0.0), WithinAbs(0.5, 1e-15));
  // At r = R = 0 the eigenvalues are (1 +- e)/2, so p(0) = (1 + e^2)/2.
  for (double e : {0.1, 0.7}) {
    CHECK_THAT(binary_event_prob_cat(0, 0, e), WithinAbs((1 + e * e) / 2, 1e-15));
  }
  CHECK_THAT(binary_event_prob_cat(1, 1, 0.3), WithinAbs(1.0, 1e-15));
  CHECK_THAT(binary_event_prob_cat(0.3, 0.5, 0.0), WithinAbs(0.575, 1e-15));
}

TEST_CASE("stationary bounds", "[catloss]") {
  const auto lossless = stationary_bounds(0.3, 1.0);
  CHECK_THAT(lossless.low, WithinAbs(-1.0, 1e-15));
  CHECK_THAT(lossless.high, WithinAbs(1.0, 1e-15));
  CHECK_THROWS_AS(stationary_bounds(0.0, 0.9), std::domain_error);

  const auto b = stationary_bounds(0.6, 0.9);
  CHECK_THAT(b.high, WithinAbs(0.8690029751441102, 1e-14));
  double R = 0.6;
  for (int i = 0; i < 10000; ++i) R = purity_step(R, 0.6, BinaryEvent::kZero, {0.9, false});
  CHECK_THAT(R, WithinAbs(b.high, 1e-12));

  for (double r : {-0.8, -0.3, 0.2, 0.6, 0.95}) {
    for (double eta : {0.55, 0.8, 0.99, 1.0}) {
      const auto s = stationary_bounds(r, eta);
      const FeedbackModel m{eta, false};
      // The k = 0 map fixes the bound with the sign of r, the k != 0 map the
      // other one.
      const double same = r > 0 ? s.high : s.low;
      const double other = r > 0 ? s.low : s.high;
      REQUIRE(std::abs(purity_step(same, r, BinaryEvent::kZero, m) - same) < 1e-12);
      REQUIRE(std::abs(purity_step(other, r, BinaryEvent::kNotZero, m) - other) < 1e-12);
    }
  }
}

TEST_CASE("|R| stays below max(|R0|, R_high)", "[catloss][property]") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0), eta_dist(0.05, 1.0);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 500; ++trial) {
    double r = u(rng) * 0.99;
    if (std::abs(r) < 1e-3) r = 0.5;
    const double eta = eta_dist(rng);
    double R = u(rng);
    const double bound = std::max(std::abs(R), stationary_bounds(r, eta).high);
    for (int j = 0; j < 200; ++j) {
      R = purity_step(R, r, coin(rng) ? BinaryEvent::kZero : BinaryEvent::kNotZero,
                      FeedbackModel{eta, false});
      REQUIRE(std::abs(R) <= bound + 1e-12);
    }
  }
}

TEST_CASE("feedback thresholds", "[catloss]") {
  CHECK_THAT(min_feedback_efficiency(1e-9), WithinAbs(0.5, 1e-15));
  CHECK_THAT(min_feedback_efficiency(1.0), WithinAbs(1.0, 1e-15));
  CHECK_THAT(min_feedback_efficiency(0.6), WithinAbs(0.68, 1e-15));

  CHECK_THAT(required_efficiency(1.0, 0.01), WithinAbs(0.99, 1e-15));
  CHECK_THAT(required_efficiency(0.5, 1e-14), WithinAbs(1.0, 1e-13));
  CHECK_THROWS_AS(required_efficiency(0.5, 0.0), std::invalid_argument);

  for (double r : {0.1, 0.3, 0.6, 0.9, 1.0}) {
    for (double eps : {1e-4, 1e-3, 1e-2}) {
      const double eta = required_efficiency(r, eps);
      REQUIRE(stationary_bounds(r, eta).high >= 1.0 - eps - 2.0 * eps * eps);
    }
  }

  SECTION("threshold sharpness") {
    for (double r : {0.2, 0.5, 0.8}) {
      const double threshold = min_feedback_efficiency(r);
      double below = r, above = r;
      bool exceeded = false;
      for (int j = 0; j < 1000; ++j) {
        below = purity_step(below, r, BinaryEvent::kZero, {threshold - 0.01, false});
        above = purity_step(above, r, BinaryEvent::kZero, {threshold + 0.01, false});
        REQUIRE(below <= r);
        exceeded |= above > r;
      }
      CHECK(exceeded);
    }
  }
}
