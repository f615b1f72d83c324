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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace purify {

/// Raised when an operation is asked to condition on an outcome whose
/// probability is zero (below kImpossibleThreshold).
class ImpossibleOutcome : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Outcomes with probability below this are rejected instead of producing a
/// denormal state.
inline constexpr double kImpossibleThreshold = 1e-300;

/// Tolerance on the normalization of a MixtureState.
inline constexpr double kNormTolerance = 1e-12;

/// Diagonal weights P_n over the M+1 orthogonal eigenstates of a truncated
/// mixture. The truncation order M is always probs().size() - 1.
class MixtureState {
 public:
  /// Validates non-negativity and unit sum (within kNormTolerance).
  explicit MixtureState(std::vector<double> probs);

  /// Divides by the sum. Rejects negative entries and a zero total.
  static MixtureState normalized(std::vector<double> weights);
  static MixtureState uniform(std::size_t order);
  /// Pure eigenstate |Psi_n> of an order-M mixture.
  static MixtureState pure(std::size_t order, std::size_t index);
  /// p_n proportional to base^n, n = 0..order.
  static MixtureState geometric(double base, std::size_t order);

  std::size_t order() const { return probs_.size() - 1; }
  std::size_t size() const { return probs_.size(); }
  std::span<const double> probs() const { return probs_; }
  double operator[](std::size_t n) const { return probs_[n]; }

  double max_prob() const;
  std::size_t argmax() const;

  bool operator==(const MixtureState&) const = default;

 private:
  std::vector<double> probs_;
};

/// Ordered detection history k^(1), ..., k^(j) for an order-M mixture.
class EventRecord {
 public:
  EventRecord(std::size_t order, std::vector<std::size_t> events);

  std::size_t order() const { return order_; }
  std::span<const std::size_t> events() const { return events_; }
  std::size_t steps() const { return events_.size(); }
  bool operator==(const EventRecord&) const = default;

 private:
  std::size_t order_;
  std::vector<std::size_t> events_;
};

/// Sufficient statistics s_0..s_M of a record; steps() is sum of s_l.
class EventCounts {
 public:
  explicit EventCounts(std::vector<std::uint64_t> counts);
  static EventCounts from_record(const EventRecord& record);

  std::size_t order() const { return counts_.size() - 1; }
  std::span<const std::uint64_t> counts() const { return counts_; }
  std::uint64_t steps() const { return steps_; }

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t steps_;
};

/// j binary steps, q of which were the event k = 0.
struct BinaryRecord {
  BinaryRecord(std::uint64_t steps, std::uint64_t zeros);

  std::uint64_t steps;
  std::uint64_t zeros;
};

enum class BinaryEvent { kZero, kNotZero };

std::string to_string(BinaryEvent event);

/// A state together with the probability of the history that produced it.
/// log_probability stays finite where probability underflows.
struct ConditionedState {
  MixtureState state;
  double probability;
  double log_probability;
};

/// Mod(m, M+1), non-negative for negative m.
std::size_t mod_index(std::int64_t m, std::size_t order);

/// p(k) = sum_n P_n p_{[n-k]} for k = 0..M.
std::vector<double> outcome_distribution(const MixtureState& state,
                                         const MixtureState& source);

/// Unnormalized reweighting P_n p_{[n-k]}; step() divides by the sum.
std::vector<double> reweight(const MixtureState& state,
                             const MixtureState& source, std::size_t k);

/// One purification cycle conditioned on outcome k.
/// Throws ImpossibleOutcome if p(k) < kImpossibleThreshold.
MixtureState step(const MixtureState& state, const MixtureState& source,
                  std::size_t k);

/// p(0) = sum_n P_n p_n.
double binary_outcome_prob(const MixtureState& state,
                           const MixtureState& source);

/// Probability of `event` under binary detection (p(0) or 1 - p(0)).
double binary_event_prob(const MixtureState& state, const MixtureState& source,
                         BinaryEvent event);

MixtureState binary_step(const MixtureState& state, const MixtureState& source,
                         BinaryEvent event);

/// Closed form after j full-outcome steps starting from the source itself.
/// The probability includes the multinomial coefficient.
ConditionedState state_from_counts(const MixtureState& source,
                                   const EventCounts& counts);

/// Closed form after j binary steps with q zeros, binomial coefficient
/// included.
ConditionedState state_from_binary_counts(const MixtureState& source,
                                          const BinaryRecord& record);

/// Von Neumann entropy of the diagonal mixture in nats.
double von_neumann_entropy(const MixtureState& state);

/// sum_k p(k) step(state, source, k); equals `state` up to roundoff.
MixtureState average_over_outcomes(const MixtureState& state,
                                   const MixtureState& source);

}  // namespace purify
