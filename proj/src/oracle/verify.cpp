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

#include "purify/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "purify/core.hpp"
#include "purify/oracle.hpp"

namespace purify::oracle {

namespace {

MixtureState random_mixture(std::size_t size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::vector<double> w(size);
  for (double& x : w) x = weight(rng);
  return MixtureState::normalized(std::move(w));
}

std::vector<Tuple> all_tuples(std::size_t base, std::size_t length) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < length; ++i) total *= base;
  std::vector<Tuple> out(total, Tuple(length));
  for (std::size_t index = 0; index < total; ++index) {
    std::size_t rest = index;
    for (std::size_t pos = length; pos-- > 0;) {
      out[index][pos] = rest % base;
      rest /= base;
    }
  }
  return out;
}

// The modes II state moved onto modes I: |0>_I |psi>_II -> |psi>_I |0>_II.
FockStateVector transfer_to_signal(const FockStateVector& copy) {
  const std::size_t n = copy.space.modes;
  FockStateVector joint =
      tensor(FockStateVector::vacuum(copy.space), copy);
  for (std::size_t j = 0; j < n; ++j) joint = mode_transfer(joint, n + j, j);
  return leading_factor(joint, n);
}

double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

NetworkCheck verify_network(std::size_t order, std::size_t modes,
                            std::size_t cutoff, std::size_t trials,
                            std::uint64_t seed, EngineVariant engine) {
  NetworkCheck check;
  check.order = order;
  check.modes = modes;
  check.cutoff = cutoff;
  check.trials = trials;
  check.prefactor_expected =
      std::pow(static_cast<double>(order + 1),
               1.0 - 2.0 * static_cast<double>(modes));
  check.prefactor_min = std::numeric_limits<double>::infinity();
  check.prefactor_max = -std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(seed);
  const std::size_t blocks = cutoff / (order + 1);
  const auto k_tuples = all_tuples(order + 1, modes);

  for (std::size_t trial = 0; trial < trials; ++trial) {
    const auto spec =
        random_eigenstate_spec(order, modes, order + 1, blocks, rng);
    std::vector<FockStateVector> basis;
    for (std::size_t n = 0; n <= order; ++n) {
      basis.push_back(build_eigenstate(spec, n, cutoff));
    }
    const MixtureState signal_probs = random_mixture(order + 1, rng);
    const MixtureState copy_probs = random_mixture(order + 1, rng);
    const auto signal = DensityOperator::mixture(basis, signal_probs.probs());
    const auto copy = DensityOperator::mixture(basis, copy_probs.probs());

    std::vector<FockStateVector> moved;
    for (const auto& psi : basis) moved.push_back(transfer_to_signal(psi));
    const auto copy_on_signal =
        DensityOperator::mixture(moved, copy_probs.probs());
    const Eigen::MatrixXcd w = index_rotation(basis);

    const auto engine_p = outcome_distribution(signal_probs, copy_probs);
    for (std::size_t k = 0; k <= order; ++k) {
      const auto oracle_out = outcome_class_output(signal, copy, k, order);
      check.max_probability_deviation =
          std::max(check.max_probability_deviation,
                   std::abs(oracle_out.probability - engine_p[k]));

      std::vector<double> predicted;
      if (engine == EngineVariant::kReference) {
        const auto next = step(signal_probs, copy_probs, k);
        predicted.assign(next.probs().begin(), next.probs().end());
      } else {
        predicted = reweight(signal_probs, copy_probs, k);
      }
      const auto expected = DensityOperator::mixture(basis, predicted);
      const double deficit =
          oracle_out.state ? 1.0 - fidelity(*oracle_out.state, expected) : 1.0;
      check.max_fidelity_deficit = std::max(check.max_fidelity_deficit, deficit);

      Eigen::MatrixXcd w_power = Eigen::MatrixXcd::Identity(w.rows(), w.cols());
      for (std::size_t i = 0; i < k; ++i) w_power = w_power * w;
      const Eigen::MatrixXcd rotation_form =
          signal.matrix() * w_power.adjoint() * copy_on_signal.matrix() *
          w_power;
      const double rotation_trace = rotation_form.trace().real();

      for (const auto& ks : k_tuples) {
        RepeaterOutcome outcome{ks, {}};
        if (outcome.outcome_class(order) != k) continue;
        for (const auto& ms : k_tuples) {
          outcome.m = ms;
          const auto single = network_output(signal, copy, outcome, order);
          if (!single.state || !oracle_out.state) continue;
          check.max_class_dependence =
              std::max(check.max_class_dependence,
                       max_abs_diff(single.state->matrix(),
                                    oracle_out.state->matrix()));
          check.max_rotation_form_deviation = std::max(
              check.max_rotation_form_deviation,
              max_abs_diff(single.state->matrix(),
                           rotation_form / rotation_trace));
          const double prefactor = single.probability / rotation_trace;
          check.prefactor_min = std::min(check.prefactor_min, prefactor);
          check.prefactor_max = std::max(check.prefactor_max, prefactor);
        }
      }
    }
  }
  check.passed = check.max_fidelity_deficit < kNetworkTolerance &&
                 check.max_probability_deviation < kNetworkTolerance;
  return check;
}

SingleInstantCheck verify_single_instant(std::size_t order, std::size_t modes,
                                         std::size_t cutoff,
                                         std::size_t trials,
                                         std::uint64_t seed) {
  SingleInstantCheck check;
  check.order = order;
  check.modes = modes;
  check.cutoff = cutoff;
  check.trials = trials;

  std::mt19937_64 rng(seed);
  const std::size_t blocks = cutoff / (order + 1);
  const auto n_tuples = all_tuples(order + 1, modes);

  for (std::size_t trial = 0; trial < trials; ++trial) {
    const auto spec =
        random_eigenstate_spec(order, modes, n_tuples.size(), blocks, rng);
    std::vector<FockStateVector> basis;
    for (const auto& ns : n_tuples) {
      basis.push_back(build_product_eigenstate(spec, ns, cutoff));
    }
    const MixtureState probs = random_mixture(n_tuples.size(), rng);
    const auto signal = DensityOperator::mixture(basis, probs.probs());

    for (std::size_t label = 0; label < n_tuples.size(); ++label) {
      const auto out = single_instant_output(signal, n_tuples[label], order);
      check.max_probability_deviation = std::max(
          check.max_probability_deviation,
          std::abs(out.probability - probs[label]));
      const double deficit =
          out.state ? 1.0 - fidelity(DensityOperator::pure(basis[label]),
                                     *out.state)
                    : 1.0;
      check.max_fidelity_deficit = std::max(check.max_fidelity_deficit, deficit);
    }
  }
  check.passed = check.max_fidelity_deficit < kSingleInstantTolerance &&
                 check.max_probability_deviation < kSingleInstantTolerance;
  return check;
}

}  // namespace purify::oracle
