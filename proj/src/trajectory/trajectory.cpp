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

#include "purify/trajectory.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

namespace purify {

namespace {

bool reached(const MixtureState& state, const std::optional<double>& stop) {
  return stop.has_value() && state.max_prob() >= *stop;
}

MixtureState advance(const MixtureState& state, const MixtureState& source,
                     DetectionMode mode, std::size_t outcome) {
  if (mode == DetectionMode::kFullK) return step(state, source, outcome);
  return binary_step(state, source,
                     outcome == 0 ? BinaryEvent::kZero : BinaryEvent::kNotZero);
}

TrajectoryResult run_with_stream(const TrajectoryConfig& config,
                                 RngStream rng) {
  MixtureState state = config.source;
  std::vector<std::size_t> events;
  std::vector<double> trace{von_neumann_entropy(state)};
  events.reserve(config.max_steps);
  trace.reserve(config.max_steps + 1);

  while (!reached(state, config.stop_purity) &&
         events.size() < config.max_steps) {
    const std::size_t k =
        sample_outcome(state, config.source, config.mode, rng);
    state = advance(state, config.source, config.mode, k);
    events.push_back(k);
    trace.push_back(von_neumann_entropy(state));
  }

  std::optional<std::size_t> purified;
  if (reached(state, config.stop_purity)) purified = state.argmax();
  return {config.mode, EventRecord(config.source.order(), std::move(events)),
          std::move(trace), std::move(state), purified};
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream RngStream::for_run(std::uint64_t seed, std::uint64_t run) {
  return RngStream(mix64(mix64(seed) ^ run));
}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

void TrajectoryConfig::validate() const {
  if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
  if (stop_purity && !(*stop_purity > 0.0 && *stop_purity <= 1.0)) {
    throw std::invalid_argument("stop_purity must lie in (0, 1]");
  }
}

std::size_t sample_outcome(const MixtureState& state,
                           const MixtureState& source, DetectionMode mode,
                           RngStream& rng) {
  const double u = rng.uniform();
  if (mode == DetectionMode::kBinary) {
    return u < binary_outcome_prob(state, source) ? 0 : 1;
  }
  const auto p = outcome_distribution(state, source);
  double total = 0.0;
  for (double pk : p) total += pk;
  const double target = u * total;
  double cumulative = 0.0;
  std::size_t last_possible = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    cumulative += p[k];
    last_possible = k;
    if (target < cumulative) return k;
  }
  return last_possible;
}

TrajectoryResult run_trajectory(const TrajectoryConfig& config) {
  config.validate();
  return run_with_stream(config, RngStream::for_run(config.seed, 0));
}

TrajectoryResult force_record(const MixtureState& source,
                              const EventRecord& record, DetectionMode mode,
                              std::optional<double> stop_purity) {
  if (record.order() != source.order()) {
    throw std::invalid_argument("record and source have different M");
  }
  if (mode == DetectionMode::kBinary) {
    for (std::size_t e : record.events()) {
      if (e > 1) throw std::out_of_range("binary records hold only 0 and 1");
    }
  }
  MixtureState state = source;
  std::vector<double> trace{von_neumann_entropy(state)};
  std::size_t index = 0;
  for (std::size_t k : record.events()) {
    ++index;
    try {
      state = advance(state, source, mode, k);
    } catch (const ImpossibleOutcome& e) {
      std::ostringstream msg;
      msg << "step " << index << " (outcome " << k << "): " << e.what();
      throw ImpossibleOutcome(msg.str());
    }
    trace.push_back(von_neumann_entropy(state));
  }
  std::optional<std::size_t> purified;
  if (reached(state, stop_purity)) purified = state.argmax();
  return {mode, record, std::move(trace), std::move(state), purified};
}

std::vector<TrajectoryResult> run_trajectories(const TrajectoryConfig& config,
                                               std::size_t runs,
                                               std::size_t workers) {
  config.validate();
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  workers = std::clamp<std::size_t>(workers, 1, runs);

  std::vector<std::optional<TrajectoryResult>> slots(runs);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < runs; i = next++) {
      slots[i] = run_with_stream(config, RngStream::for_run(config.seed, i));
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::vector<TrajectoryResult> results;
  results.reserve(runs);
  for (auto& slot : slots) results.push_back(std::move(*slot));
  return results;
}

EnsembleSummary summarize(std::span<const TrajectoryResult> results,
                          std::size_t order) {
  EnsembleSummary summary;
  summary.runs = results.size();
  summary.purified_histogram.assign(order + 1, 0);
  std::size_t purified = 0;
  double steps = 0.0;
  for (const auto& r : results) {
    if (!r.purified_index) continue;
    ++summary.purified_histogram[*r.purified_index];
    ++purified;
    steps += static_cast<double>(r.steps());
  }
  if (purified > 0) summary.mean_steps_to_purity = steps / purified;
  if (summary.runs > 0) {
    summary.fraction_purified =
        static_cast<double>(purified) / static_cast<double>(summary.runs);
  }
  return summary;
}

EnsembleSummary run_ensemble(const TrajectoryConfig& config, std::size_t runs,
                             std::size_t workers) {
  const auto results = run_trajectories(config, runs, workers);
  return summarize(results, config.source.order());
}

}  // namespace purify
