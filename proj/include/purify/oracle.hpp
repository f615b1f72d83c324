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

#include <complex>
#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace purify::oracle {

using Complex = std::complex<double>;
using Tuple = std::vector<std::size_t>;

/// Product of `modes` Fock spaces truncated at `cutoff` photons (exclusive).
/// Basis index is row-major in the photon-number tuple, mode 0 slowest.
struct FockSpace {
  std::size_t modes = 1;
  std::size_t cutoff = 1;

  std::size_t dimension() const;
  std::size_t index(std::span<const std::size_t> photons) const;
  Tuple photons(std::size_t index) const;
  bool operator==(const FockSpace&) const = default;
};

struct FockStateVector {
  FockSpace space;
  Eigen::VectorXcd amplitudes;

  static FockStateVector vacuum(FockSpace space);
  static FockStateVector basis(FockSpace space,
                               std::span<const std::size_t> photons);
  double norm() const { return amplitudes.norm(); }
};

/// Joint state of a's modes followed by b's modes.
FockStateVector tensor(const FockStateVector& a, const FockStateVector& b);

class DensityOperator {
 public:
  /// No validation; use validate() for physical states.
  DensityOperator(FockSpace space, Eigen::MatrixXcd matrix);

  static DensityOperator pure(const FockStateVector& state);
  /// sum_i weights[i] |states[i]><states[i]|.
  static DensityOperator mixture(std::span<const FockStateVector> states,
                                 std::span<const double> weights);

  const FockSpace& space() const { return space_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  double trace() const { return matrix_.trace().real(); }

  /// Hermiticity, unit trace and positivity within `tolerance`.
  void validate(double tolerance = 1e-10) const;
  /// Replaces the matrix by (A + A^dagger) / 2.
  void symmetrize();
  DensityOperator normalized() const;

 private:
  FockSpace space_;
  Eigen::MatrixXcd matrix_;
};

/// One coefficient c_l(n) for the block tuple l.
struct LCoefficient {
  Tuple l;
  Complex c;
};

/// Finitely supported expansion coefficients of the eigenstates, indexed by
/// label. For the entangled eigenstates the label is n in [0, M]; for the
/// product eigenstates it is the row-major index of the n-tuple.
struct EigenstateSpec {
  std::size_t order = 0;
  std::size_t modes = 1;
  std::vector<std::vector<LCoefficient>> coeffs;

  void validate() const;
};

/// Random normalized coefficients over all block tuples l in
/// [0, blocks)^modes for `labels` labels.
EigenstateSpec random_eigenstate_spec(std::size_t order, std::size_t modes,
                                      std::size_t labels, std::size_t blocks,
                                      std::mt19937_64& rng);

/// Entangled eigenstate |Psi_n>: sum over n-tuples with [sum n_j] = n.
FockStateVector build_eigenstate(const EigenstateSpec& spec, std::size_t n,
                                 std::size_t cutoff);

/// Product eigenstate |Psi_{n_1..n_N}> without the tuple-sum constraint.
FockStateVector build_product_eigenstate(const EigenstateSpec& spec,
                                         std::span<const std::size_t> n_tuple,
                                         std::size_t cutoff);

/// U_kl = exp(2 pi i k l / (M+1)) / sqrt(M+1).
Eigen::MatrixXcd dft_matrix(std::size_t order);

/// Operators on a signal mode pair (j, -j) that are diagonal in the pair
/// Fock basis; entry n_j * cutoff + n_-j.
using PairDiagonal = Eigen::DiagonalMatrix<Complex, Eigen::Dynamic>;

/// <phi_k| U^dagger K U |phi_0> evaluated as the sum over auxiliary
/// excitations m of exp(2 pi i m (n_j - n_-j - k) / (M+1)) / (M+1).
PairDiagonal kerr_projector_block(std::size_t k, std::size_t order,
                                  std::size_t cutoff);

/// Phase correction exp(2 pi i m n_j / (M+1)) applied after the Kerr block.
PairDiagonal repeater_operator(std::size_t k, std::size_t m,
                               std::size_t order, std::size_t cutoff);

/// Pegg-Barnett phase POVM element on one mode. Requires complete blocks:
/// cutoff must be a multiple of M+1.
Eigen::MatrixXcd povm_element(std::size_t m, std::size_t order,
                              std::size_t cutoff);

/// Auxiliary detections k_j and phase readings m_j of the N repeaters.
struct RepeaterOutcome {
  Tuple k;
  Tuple m;

  /// [sum_j k_j] for truncation order M.
  std::size_t outcome_class(std::size_t order) const;
};

struct NetworkOutput {
  double probability = 0.0;
  /// Empty when the outcome has zero probability.
  std::optional<DensityOperator> state;
};

/// Unnormalized conditional state of modes I; its trace is p(m, k).
Eigen::MatrixXcd network_output_unnormalized(const DensityOperator& signal,
                                             const DensityOperator& copy,
                                             const RepeaterOutcome& outcome,
                                             std::size_t order);

/// Applies Y(k) to R_I (x) rho_II, projects modes II on Pi(m) and traces
/// them out.
NetworkOutput network_output(const DensityOperator& signal,
                             const DensityOperator& copy,
                             const RepeaterOutcome& outcome,
                             std::size_t order);

/// network_output summed over all phase readings and all k-vectors in
/// outcome class k.
NetworkOutput outcome_class_output(const DensityOperator& signal,
                                   const DensityOperator& copy,
                                   std::size_t k, std::size_t order);

/// Second copy replaced by vacuum and no phase measurement: projects each
/// signal mode j on n_j = k_j mod (M+1).
NetworkOutput single_instant_output(const DensityOperator& signal,
                                    std::span<const std::size_t> k,
                                    std::size_t order);

/// Moves the content of mode `from` to mode `to` (and vice versa), i.e. the
/// relabeling sum_n |n>_to <n|_from on the pair.
FockStateVector mode_transfer(const FockStateVector& state, std::size_t from,
                              std::size_t to);
DensityOperator mode_transfer(const DensityOperator& state, std::size_t from,
                              std::size_t to);

/// Leading `modes` modes of a state whose remaining modes are in vacuum.
FockStateVector leading_factor(const FockStateVector& state,
                               std::size_t modes);

/// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2, clamped to [0, 1].
double fidelity(const DensityOperator& a, const DensityOperator& b);

/// W with W^dagger |Psi_n> = |Psi_{[n+1]}>, zero off the eigenstate span.
Eigen::MatrixXcd index_rotation(std::span<const FockStateVector> eigenstates);

}  // namespace purify::oracle
