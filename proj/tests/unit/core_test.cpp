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
#include <vector>

#include "purify/core.hpp"

using namespace purify;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

MixtureState random_state(std::size_t order, std::mt19937_64& rng,
                          bool allow_zeros = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(order + 1);
  for (double& x : w) x = u(rng);
  if (allow_zeros) {
    for (double& x : w) {
      if (u(rng) < 0.2) x = 0.0;
    }
    w[0] += 1e-3;
  }
  return MixtureState::normalized(w);
}

double max_diff(const MixtureState& a, const MixtureState& b) {
  double d = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) d = std::max(d, std::abs(a[n] - b[n]));
  return d;
}

// Sequential fold over a record; the returned probability is the product of
// per-step outcome probabilities (no multinomial factor).
std::pair<MixtureState, double> fold(const MixtureState& source,
                                     const std::vector<std::size_t>& record) {
  MixtureState state = source;
  double p = 1.0;
  for (std::size_t k : record) {
    p *= outcome_distribution(state, source)[k];
    state = step(state, source, k);
  }
  return {state, p};
}

double multinomial(const std::vector<std::uint64_t>& s) {
  std::uint64_t j = 0;
  double log_c = 0.0;
  for (auto v : s) {
    j += v;
    log_c -= std::lgamma(v + 1.0);
  }
  return std::exp(log_c + std::lgamma(j + 1.0));
}

}  // namespace

TEST_CASE("mod_index wraps into [0, M]", "[core]") {
  CHECK(mod_index(5, 2) == 2);
  CHECK(mod_index(0, 7) == 0);
  CHECK(mod_index(-1, 2) == 2);
  CHECK(mod_index(-7, 2) == 2);
  CHECK(mod_index(3, 0) == 0);
}

TEST_CASE("MixtureState validation", "[core]") {
  CHECK_THROWS_AS(MixtureState({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(MixtureState({1.2, -0.2}), std::invalid_argument);
  CHECK_THROWS_AS(MixtureState({}), std::invalid_argument);
  CHECK_THROWS_AS(MixtureState::normalized({0.0, 0.0}), std::invalid_argument);
  CHECK(MixtureState::normalized({3.0, 1.0}) == MixtureState({0.75, 0.25}));
  CHECK(MixtureState::pure(3, 2).argmax() == 2);
  CHECK_THROWS_AS(EventRecord(1, {0, 2}), std::out_of_range);
  CHECK_THROWS_AS(BinaryRecord(2, 3), std::invalid_argument);
}

TEST_CASE("outcome_distribution", "[core]") {
  const MixtureState s({0.75, 0.25});
  const auto p = outcome_distribution(s, s);
  CHECK_THAT(p[0], WithinAbs(0.625, 1e-15));
  CHECK_THAT(p[1], WithinAbs(0.375, 1e-15));

  const MixtureState source({0.3, 0.7});
  const auto q = outcome_distribution(MixtureState::pure(1, 0), source);
  CHECK_THAT(q[0], WithinAbs(0.3, 1e-15));
  CHECK_THAT(q[1], WithinAbs(0.7, 1e-15));

  std::mt19937_64 rng(1);
  const auto u = outcome_distribution(random_state(5, rng), MixtureState::uniform(5));
  for (double pk : u) CHECK_THAT(pk, WithinAbs(1.0 / 6.0, 1e-15));

  CHECK_THROWS_AS(outcome_distribution(MixtureState::uniform(1), MixtureState::uniform(2)),
                  std::invalid_argument);
}

TEST_CASE("step", "[core]") {
  const MixtureState s({0.75, 0.25});
  const auto next = step(s, s, 0);
  CHECK_THAT(next[0], WithinAbs(0.9, 1e-15));
  CHECK_THAT(next[1], WithinAbs(0.1, 1e-15));

  std::mt19937_64 rng(2);
  const auto state = random_state(4, rng);
  for (std::size_t k = 0; k <= 4; ++k) {
    CHECK(max_diff(step(state, MixtureState::uniform(4), k), state) < 1e-15);
  }

  const auto pure = MixtureState::pure(3, 1);
  const auto source = random_state(3, rng);
  for (std::size_t k = 0; k <= 3; ++k) CHECK(step(pure, source, k) == pure);

  SECTION("impossible outcome") {
    const MixtureState a({1.0, 0.0});
    const MixtureState b({1.0, 0.0});
    CHECK_THROWS_AS(step(a, b, 1), ImpossibleOutcome);
  }
}

TEST_CASE("binary step and probability", "[core]") {
  const MixtureState s({0.75, 0.25});
  CHECK_THAT(binary_outcome_prob(s, s), WithinAbs(0.625, 1e-15));
  CHECK_THAT(binary_outcome_prob(MixtureState::pure(1, 0), MixtureState({0.3, 0.7})),
             WithinAbs(0.3, 1e-15));

  const auto zero = binary_step(s, s, BinaryEvent::kZero);
  CHECK_THAT(zero[0], WithinAbs(0.9, 1e-15));
  const auto miss = binary_step(s, s, BinaryEvent::kNotZero);
  CHECK_THAT(miss[0], WithinAbs(0.5, 1e-15));
  CHECK_THAT(miss[1], WithinAbs(0.5, 1e-15));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto state = random_state(6, rng);
    CHECK_THAT(binary_outcome_prob(state, MixtureState::uniform(6)),
               WithinAbs(1.0 / 7.0, 1e-15));
    CHECK(max_diff(binary_step(state, MixtureState::uniform(6), BinaryEvent::kZero),
                   state) < 1e-15);
    CHECK(max_diff(binary_step(state, MixtureState::uniform(6), BinaryEvent::kNotZero),
                   state) < 1e-15);
  }

  const auto pure = MixtureState::pure(2, 0);
  CHECK(binary_step(pure, MixtureState({0.5, 0.3, 0.2}), BinaryEvent::kNotZero) == pure);
  CHECK_THROWS_AS(binary_step(pure, MixtureState({1.0, 0.0, 0.0}), BinaryEvent::kNotZero),
                  ImpossibleOutcome);
}

TEST_CASE("binary aggregation matches the k != 0 mixture", "[core][property]") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t order = 1 + rng() % 10;
    const auto state = random_state(order, rng);
    const auto source = random_state(order, rng);
    const auto p = outcome_distribution(state, source);
    std::vector<double> mix(order + 1, 0.0);
    double total = 0.0;
    for (std::size_t k = 1; k <= order; ++k) {
      const auto next = step(state, source, k);
      for (std::size_t n = 0; n <= order; ++n) mix[n] += p[k] * next[n];
      total += p[k];
    }
    for (double& x : mix) x /= total;
    const auto binary = binary_step(state, source, BinaryEvent::kNotZero);
    for (std::size_t n = 0; n <= order; ++n) REQUIRE(std::abs(binary[n] - mix[n]) < 1e-12);
    REQUIRE(std::abs(binary_outcome_prob(state, source) - p[0]) < 1e-15);
  }
}

TEST_CASE("average over outcomes returns the input state", "[core][property]") {
  std::mt19937_64 rng(5);
  const auto pure = MixtureState::pure(4, 3);
  CHECK(max_diff(average_over_outcomes(pure, MixtureState({0.2, 0.2, 0.2, 0.2, 0.2})),
                 pure) < 1e-15);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto state = random_state(16, rng, true);
    const auto source = random_state(16, rng, true);
    worst = std::max(worst, max_diff(average_over_outcomes(state, source), state));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("closed form for full outcome counts", "[core]") {
  const MixtureState source({0.5, 0.3, 0.2});

  SECTION("only k = 0 events give p_n^(j+1)") {
    const auto out = state_from_counts(source, EventCounts({4, 0, 0}));
    const double z = std::pow(0.5, 5) + std::pow(0.3, 5) + std::pow(0.2, 5);
    CHECK_THAT(out.state[0], WithinAbs(std::pow(0.5, 5) / z, 1e-15));
    CHECK_THAT(out.state[2], WithinAbs(std::pow(0.2, 5) / z, 1e-15));
    CHECK_THAT(out.probability, WithinRel(z, 1e-13));
  }
  SECTION("j = 0 echoes the source") {
    const auto out = state_from_counts(source, EventCounts({0, 0, 0}));
    CHECK(max_diff(out.state, source) < 1e-15);
    CHECK_THAT(out.probability, WithinAbs(1.0, 1e-15));
  }
  SECTION("impossible record") {
    const MixtureState peaked({1.0, 0.0, 0.0});
    CHECK_THROWS_AS(state_from_counts(peaked, EventCounts({0, 1, 0})), ImpossibleOutcome);
  }
  SECTION("mismatched order") {
    CHECK_THROWS_AS(state_from_counts(source, EventCounts({1, 1})), std::invalid_argument);
  }
}

TEST_CASE("closed form matches sequential folding", "[core][property]") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t order = 1 + rng() % 16;
    const std::size_t j = rng() % 51;
    const auto source = random_state(order, rng, true);
    std::vector<std::size_t> events;
    MixtureState walker = source;
    for (std::size_t i = 0; i < j; ++i) {
      // Draw only feasible outcomes so the record is admissible.
      const auto p = outcome_distribution(walker, source);
      std::discrete_distribution<std::size_t> pick(p.begin(), p.end());
      events.push_back(pick(rng));
      walker = step(walker, source, events.back());
    }
    const EventRecord record(order, events);
    const auto counts = EventCounts::from_record(record);
    const auto [folded, p_sequence] = fold(source, events);
    const auto closed = state_from_counts(source, counts);

    REQUIRE(max_diff(folded, closed.state) < 1e-12);
    std::vector<std::uint64_t> s(counts.counts().begin(), counts.counts().end());
    REQUIRE_THAT(closed.probability, WithinRel(multinomial(s) * p_sequence, 1e-10));

    // Any permutation of the record gives the same state.
    std::shuffle(events.begin(), events.end(), rng);
    REQUIRE(max_diff(fold(source, events).first, closed.state) < 1e-12);
  }
}

TEST_CASE("binary closed form", "[core]") {
  const MixtureState source({0.75, 0.25});
  const auto out = state_from_binary_counts(source, BinaryRecord(2, 2));
  CHECK_THAT(out.state[0], WithinAbs(27.0 / 28.0, 1e-15));
  CHECK_THAT(out.state[1], WithinAbs(1.0 / 28.0, 1e-15));

  const auto empty = state_from_binary_counts(source, BinaryRecord(0, 0));
  CHECK(max_diff(empty.state, source) < 1e-15);
  CHECK_THAT(empty.probability, WithinAbs(1.0, 1e-15));

  CHECK_THROWS_AS(state_from_binary_counts(MixtureState({1.0, 0.0}), BinaryRecord(1, 0)),
                  ImpossibleOutcome);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t order = 1 + rng() % 8;
    const auto src = random_state(order, rng);
    const std::uint64_t j = rng() % 51;
    const std::uint64_t q = j == 0 ? 0 : rng() % (j + 1);
    std::vector<BinaryEvent> events(j, BinaryEvent::kNotZero);
    std::fill_n(events.begin(), q, BinaryEvent::kZero);
    std::shuffle(events.begin(), events.end(), rng);
    MixtureState state = src;
    double p = 1.0;
    for (auto e : events) {
      p *= binary_event_prob(state, src, e);
      state = binary_step(state, src, e);
    }
    const auto closed = state_from_binary_counts(src, BinaryRecord(j, q));
    REQUIRE(max_diff(state, closed.state) < 1e-12);
    const double binom = std::exp(std::lgamma(j + 1.0) - std::lgamma(q + 1.0) -
                                  std::lgamma(j - q + 1.0));
    REQUIRE_THAT(closed.probability, WithinRel(binom * p, 1e-10));
  }
}

TEST_CASE("closed form survives long records", "[core]") {
  const auto source = MixtureState::geometric(std::exp(-1.0), 100);
  const auto out = state_from_binary_counts(source, BinaryRecord(2000, 2000));
  CHECK(out.state[0] == 1.0);
  CHECK(out.probability == 0.0);
  // Dominated by p_0^2001; the other terms are below e^-2001 relative.
  CHECK_THAT(out.log_probability, WithinRel(2001.0 * std::log(source[0]), 1e-12));
}

TEST_CASE("von Neumann entropy", "[core]") {
  CHECK(von_neumann_entropy(MixtureState::pure(5, 2)) == 0.0);
  CHECK_THAT(von_neumann_entropy(MixtureState::uniform(1)), WithinAbs(std::log(2.0), 1e-15));
  // Truncated geometric distribution with ratio 1/e, n = 0..100.
  CHECK_THAT(von_neumann_entropy(MixtureState::geometric(std::exp(-1.0), 100)),
             WithinAbs(1.040651852256408, 1e-12));
}
