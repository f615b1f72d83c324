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
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "purify/core.hpp"

namespace purify {

enum class DetectionMode { kFullK, kBinary };

/// Per-trajectory random stream. Streams for an ensemble are derived from
/// (seed, run index) so the result does not depend on scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}
  static RngStream for_run(std::uint64_t seed, std::uint64_t run);

  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform();

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer, used to derive stream seeds.
std::uint64_t mix64(std::uint64_t x);

struct TrajectoryConfig {
  std::uint64_t seed = 0;
  std::size_t max_steps = 1;
  DetectionMode mode = DetectionMode::kBinary;
  /// Stop once max_n P_n >= stop_purity. Empty runs all max_steps cycles.
  std::optional<double> stop_purity = 1.0;
  MixtureState source = MixtureState::uniform(0);

  void validate() const;
};

/// In binary mode the record holds 0 for the event k = 0 and 1 for k != 0.
struct TrajectoryResult {
  DetectionMode mode;
  EventRecord record;
  std::vector<double> entropy_trace;
  MixtureState final_state;
  std::optional<std::size_t> purified_index;

  std::size_t steps() const { return record.steps(); }
  bool operator==(const TrajectoryResult&) const = default;
};

struct EnsembleSummary {
  std::size_t runs = 0;
  std::vector<std::uint64_t> purified_histogram;
  /// Mean over purified runs; 0 when no run purified.
  double mean_steps_to_purity = 0.0;
  double fraction_purified = 0.0;

  bool operator==(const EnsembleSummary&) const = default;
};

/// Draws k from outcome_distribution, or in binary mode returns 0 (event
/// k = 0) with probability p(0) and 1 otherwise.
std::size_t sample_outcome(const MixtureState& state,
                           const MixtureState& source, DetectionMode mode,
                           RngStream& rng);

TrajectoryResult run_trajectory(const TrajectoryConfig& config);

/// Deterministic replay. Throws ImpossibleOutcome naming the failing step.
TrajectoryResult force_record(const MixtureState& source,
                              const EventRecord& record, DetectionMode mode,
                              std::optional<double> stop_purity = {});

/// Runs `runs` trajectories; run i uses RngStream::for_run(config.seed, i).
/// `workers` only affects wall time.
EnsembleSummary run_ensemble(const TrajectoryConfig& config, std::size_t runs,
                             std::size_t workers);

/// As run_ensemble but also returns every trajectory, indexed by run.
std::vector<TrajectoryResult> run_trajectories(const TrajectoryConfig& config,
                                               std::size_t runs,
                                               std::size_t workers);

EnsembleSummary summarize(std::span<const TrajectoryResult> results,
                          std::size_t order);

}  // namespace purify
