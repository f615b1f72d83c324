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

#include "purify/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace purify {

namespace {

void require_same_order(const MixtureState& a, const MixtureState& b) {
  if (a.order() != b.order()) {
    std::ostringstream msg;
    msg << "truncation order mismatch: " << a.order() << " vs " << b.order();
    throw std::invalid_argument(msg.str());
  }
}

MixtureState normalize_or_throw(std::vector<double> weights,
                                const char* what) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total >= kImpossibleThreshold)) {
    throw ImpossibleOutcome(std::string("impossible outcome: ") + what);
  }
  for (double& w : weights) w /= total;
  return MixtureState(std::move(weights));
}

// log(sum exp(x)) over finite entries; -inf if there are none.
double log_sum_exp(const std::vector<double>& logs) {
  double top = -std::numeric_limits<double>::infinity();
  for (double x : logs) top = std::max(top, x);
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double x : logs) {
    if (std::isfinite(x)) acc += std::exp(x - top);
  }
  return top + std::log(acc);
}

// ln(base^exponent) with 0^0 = 1 and 0^e = 0 for e > 0.
double log_power(double base, std::uint64_t exponent) {
  if (exponent == 0) return 0.0;
  if (base <= 0.0) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(exponent) * std::log(base);
}

ConditionedState from_log_weights(std::vector<double> log_weights,
                                  double log_coefficient, const char* what) {
  const double log_total = log_sum_exp(log_weights);
  if (!std::isfinite(log_total)) {
    throw ImpossibleOutcome(std::string("impossible record: ") + what);
  }
  std::vector<double> probs(log_weights.size());
  for (std::size_t n = 0; n < probs.size(); ++n) {
    probs[n] = std::isfinite(log_weights[n])
                   ? std::exp(log_weights[n] - log_total)
                   : 0.0;
  }
  // Renormalize the exponentiated weights; the analytic total only fixes
  // the scale.
  auto state = MixtureState::normalized(std::move(probs));
  const double log_p = log_coefficient + log_total;
  return {std::move(state), std::exp(log_p), log_p};
}

}  // namespace

MixtureState::MixtureState(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) {
    throw std::invalid_argument("mixture needs at least one weight");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("mixture weights must be finite and >= 0");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "mixture weights sum to " << total << ", expected 1";
    throw std::invalid_argument(msg.str());
  }
}

MixtureState MixtureState::normalized(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("weights must be finite and >= 0");
    }
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("weights sum to zero");
  for (double& w : weights) w /= total;
  return MixtureState(std::move(weights));
}

MixtureState MixtureState::uniform(std::size_t order) {
  return MixtureState(std::vector<double>(order + 1, 1.0 / (order + 1.0)));
}

MixtureState MixtureState::pure(std::size_t order, std::size_t index) {
  if (index > order) throw std::out_of_range("pure state index exceeds M");
  std::vector<double> probs(order + 1, 0.0);
  probs[index] = 1.0;
  return MixtureState(std::move(probs));
}

MixtureState MixtureState::geometric(double base, std::size_t order) {
  if (!(base > 0.0)) throw std::invalid_argument("geometric base must be > 0");
  std::vector<double> weights(order + 1);
  for (std::size_t n = 0; n <= order; ++n) {
    weights[n] = std::pow(base, static_cast<double>(n));
  }
  return normalized(std::move(weights));
}

double MixtureState::max_prob() const {
  return *std::max_element(probs_.begin(), probs_.end());
}

std::size_t MixtureState::argmax() const {
  return static_cast<std::size_t>(
      std::max_element(probs_.begin(), probs_.end()) - probs_.begin());
}

EventRecord::EventRecord(std::size_t order, std::vector<std::size_t> events)
    : order_(order), events_(std::move(events)) {
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (events_[i] > order_) {
      std::ostringstream msg;
      msg << "event " << i << " has outcome " << events_[i]
          << " outside [0, " << order_ << "]";
      throw std::out_of_range(msg.str());
    }
  }
}

EventCounts::EventCounts(std::vector<std::uint64_t> counts)
    : counts_(std::move(counts)) {
  if (counts_.empty()) throw std::invalid_argument("counts must not be empty");
  steps_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

EventCounts EventCounts::from_record(const EventRecord& record) {
  std::vector<std::uint64_t> counts(record.order() + 1, 0);
  for (std::size_t k : record.events()) ++counts[k];
  return EventCounts(std::move(counts));
}

BinaryRecord::BinaryRecord(std::uint64_t steps_, std::uint64_t zeros_)
    : steps(steps_), zeros(zeros_) {
  if (zeros > steps) {
    throw std::invalid_argument("binary record has more zeros than steps");
  }
}

std::string to_string(BinaryEvent event) {
  return event == BinaryEvent::kZero ? "0" : "!0";
}

std::size_t mod_index(std::int64_t m, std::size_t order) {
  const auto base = static_cast<std::int64_t>(order) + 1;
  const std::int64_t r = m % base;
  return static_cast<std::size_t>(r < 0 ? r + base : r);
}

std::vector<double> outcome_distribution(const MixtureState& state,
                                         const MixtureState& source) {
  require_same_order(state, source);
  const std::size_t order = state.order();
  std::vector<double> p(order + 1, 0.0);
  for (std::size_t k = 0; k <= order; ++k) {
    for (std::size_t n = 0; n <= order; ++n) {
      const auto shifted =
          mod_index(static_cast<std::int64_t>(n) - static_cast<std::int64_t>(k),
                    order);
      p[k] += state[n] * source[shifted];
    }
  }
  return p;
}

std::vector<double> reweight(const MixtureState& state,
                             const MixtureState& source, std::size_t k) {
  require_same_order(state, source);
  const std::size_t order = state.order();
  if (k > order) throw std::out_of_range("outcome exceeds truncation order");
  std::vector<double> weights(order + 1);
  for (std::size_t n = 0; n <= order; ++n) {
    const auto shifted = mod_index(
        static_cast<std::int64_t>(n) - static_cast<std::int64_t>(k), order);
    weights[n] = state[n] * source[shifted];
  }
  return weights;
}

MixtureState step(const MixtureState& state, const MixtureState& source,
                  std::size_t k) {
  return normalize_or_throw(reweight(state, source, k), "p(k) = 0");
}

double binary_outcome_prob(const MixtureState& state,
                           const MixtureState& source) {
  require_same_order(state, source);
  double p0 = 0.0;
  for (std::size_t n = 0; n <= state.order(); ++n) p0 += state[n] * source[n];
  return std::clamp(p0, 0.0, 1.0);
}

double binary_event_prob(const MixtureState& state, const MixtureState& source,
                         BinaryEvent event) {
  const double p0 = binary_outcome_prob(state, source);
  return event == BinaryEvent::kZero ? p0 : 1.0 - p0;
}

MixtureState binary_step(const MixtureState& state, const MixtureState& source,
                         BinaryEvent event) {
  require_same_order(state, source);
  std::vector<double> weights(state.size());
  for (std::size_t n = 0; n < weights.size(); ++n) {
    const double factor =
        event == BinaryEvent::kZero ? source[n] : 1.0 - source[n];
    weights[n] = state[n] * factor;
  }
  return normalize_or_throw(std::move(weights),
                            event == BinaryEvent::kZero ? "p(0) = 0"
                                                        : "p(!0) = 0");
}

ConditionedState state_from_counts(const MixtureState& source,
                                   const EventCounts& counts) {
  if (counts.order() != source.order()) {
    throw std::invalid_argument("counts and source have different M");
  }
  const std::size_t order = source.order();
  std::vector<double> log_weights(order + 1);
  for (std::size_t n = 0; n <= order; ++n) {
    double acc = log_power(source[n], 1);
    for (std::size_t l = 0; l <= order && std::isfinite(acc); ++l) {
      const auto shifted = mod_index(
          static_cast<std::int64_t>(n) - static_cast<std::int64_t>(l), order);
      acc += log_power(source[shifted], counts.counts()[l]);
    }
    log_weights[n] = acc;
  }
  double log_coefficient =
      std::lgamma(static_cast<double>(counts.steps()) + 1.0);
  for (std::uint64_t s : counts.counts()) {
    log_coefficient -= std::lgamma(static_cast<double>(s) + 1.0);
  }
  return from_log_weights(std::move(log_weights), log_coefficient,
                          "zero probability under source");
}

ConditionedState state_from_binary_counts(const MixtureState& source,
                                          const BinaryRecord& record) {
  const std::uint64_t misses = record.steps - record.zeros;
  std::vector<double> log_weights(source.size());
  for (std::size_t n = 0; n < source.size(); ++n) {
    log_weights[n] = log_power(source[n], record.zeros + 1) +
                     log_power(1.0 - source[n], misses);
  }
  const double log_coefficient =
      std::lgamma(static_cast<double>(record.steps) + 1.0) -
      std::lgamma(static_cast<double>(record.zeros) + 1.0) -
      std::lgamma(static_cast<double>(misses) + 1.0);
  return from_log_weights(std::move(log_weights), log_coefficient,
                          "zero probability under source");
}

double von_neumann_entropy(const MixtureState& state) {
  double s = 0.0;
  for (double p : state.probs()) {
    if (p > 0.0) s -= p * std::log(p);
  }
  return std::max(s, 0.0);
}

MixtureState average_over_outcomes(const MixtureState& state,
                                   const MixtureState& source) {
  const auto p = outcome_distribution(state, source);
  std::vector<double> mean(state.size(), 0.0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] < kImpossibleThreshold) continue;
    const auto next = step(state, source, k);
    for (std::size_t n = 0; n < mean.size(); ++n) mean[n] += p[k] * next[n];
  }
  return MixtureState::normalized(std::move(mean));
}

}  // namespace purify
