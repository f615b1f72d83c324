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

namespace purify::oracle {

/// Which engine prediction the oracle is compared against. The corrupted
/// variant skips renormalization and exists as a negative control.
enum class EngineVariant { kReference, kSkipRenormalization };

inline constexpr double kNetworkTolerance = 1e-9;
inline constexpr double kSingleInstantTolerance = 1e-10;

/// Network oracle vs. engine over random eigenbases and random diagonal
/// mixtures.
struct NetworkCheck {
  std::size_t order = 0;
  std::size_t modes = 0;
  std::size_t cutoff = 0;
  std::size_t trials = 0;
  /// max over trials and outcome classes of 1 - F(oracle, engine).
  double max_fidelity_deficit = 0.0;
  /// max |p_oracle(k) - p_engine(k)|.
  double max_probability_deviation = 0.0;
  /// max entry difference between a single (m, k) output and its class
  /// output.
  double max_class_dependence = 0.0;
  /// max entry difference between the contracted output and the normalized
  /// R W^{dagger k} rho W^k.
  double max_rotation_form_deviation = 0.0;
  /// Measured p(m, k) / Tr[R W^{dagger k} rho W^k] range and its expected
  /// value (M+1)^(1-2N).
  double prefactor_min = 0.0;
  double prefactor_max = 0.0;
  double prefactor_expected = 0.0;
  bool passed = false;
};

NetworkCheck verify_network(std::size_t order, std::size_t modes,
                            std::size_t cutoff, std::size_t trials,
                            std::uint64_t seed,
                            EngineVariant engine = EngineVariant::kReference);

/// Product-eigenstate mixture with vacuum copies: every outcome tuple k must
/// return |Psi_k> with probability p_k.
struct SingleInstantCheck {
  std::size_t order = 0;
  std::size_t modes = 0;
  std::size_t cutoff = 0;
  std::size_t trials = 0;
  double max_fidelity_deficit = 0.0;
  double max_probability_deviation = 0.0;
  bool passed = false;
};

SingleInstantCheck verify_single_instant(std::size_t order, std::size_t modes,
                                         std::size_t cutoff,
                                         std::size_t trials,
                                         std::uint64_t seed);

}  // namespace purify::oracle
