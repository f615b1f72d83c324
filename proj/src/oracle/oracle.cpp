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

#include "purify/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "purify/core.hpp"

namespace purify::oracle {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(2 pi i * residue / (M+1)) with the integer exponent reduced first.
Complex root_of_unity(std::int64_t exponent, std::size_t order) {
  const auto residue = mod_index(exponent, order);
  return std::polar(1.0, kTwoPi * static_cast<double>(residue) /
                             static_cast<double>(order + 1));
}

std::size_t integer_power(std::size_t base, std::size_t exponent) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exponent; ++i) out *= base;
  return out;
}

// Visits every tuple in [0, base)^length in row-major order.
template <typename Fn>
void for_each_tuple(std::size_t base, std::size_t length, Fn&& fn) {
  Tuple t(length, 0);
  const std::size_t total = integer_power(base, length);
  for (std::size_t count = 0; count < total; ++count) {
    fn(static_cast<const Tuple&>(t));
    for (std::size_t pos = length; pos-- > 0;) {
      if (++t[pos] < base) break;
      t[pos] = 0;
    }
  }
}

std::size_t checked_photons(std::size_t block, std::size_t n,
                            std::size_t order, std::size_t cutoff,
                            std::size_t mode) {
  const std::size_t photons = block * (order + 1) + n;
  if (photons >= cutoff) {
    std::ostringstream msg;
    msg << "cutoff " << cutoff << " too small: mode " << mode << " needs |"
        << photons << "> (l = " << block << ", n = " << n << ")";
    throw std::out_of_range(msg.str());
  }
  return photons;
}

void require_complete_blocks(std::size_t order, std::size_t cutoff) {
  if (cutoff == 0 || cutoff % (order + 1) != 0) {
    std::ostringstream msg;
    msg << "cutoff " << cutoff << " is not a multiple of M+1 = " << order + 1;
    throw std::invalid_argument(msg.str());
  }
}

// Y[a, b] = prod_j y_j(a_j, b_j) over signal tuple a and copy tuple b.
Eigen::MatrixXcd coupling_matrix(const FockSpace& space,
                                 std::span<const PairDiagonal> pairs,
                                 bool copy_in_vacuum) {
  const std::size_t dim = space.dimension();
  const std::size_t cols = copy_in_vacuum ? 1 : dim;
  Eigen::MatrixXcd y(dim, cols);
  for (std::size_t a = 0; a < dim; ++a) {
    const Tuple na = space.photons(a);
    for (std::size_t b = 0; b < cols; ++b) {
      const Tuple nb = copy_in_vacuum ? Tuple(space.modes, 0) : space.photons(b);
      Complex value = 1.0;
      for (std::size_t j = 0; j < space.modes; ++j) {
        value *= pairs[j].diagonal()(na[j] * space.cutoff + nb[j]);
      }
      y(a, b) = value;
    }
  }
  return y;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Tuple swapped_modes(Tuple photons, std::size_t from, std::size_t to) {
  std::swap(photons[from], photons[to]);
  return photons;
}

std::vector<std::size_t> transfer_permutation(const FockSpace& space,
                                              std::size_t from,
                                              std::size_t to) {
  if (from >= space.modes || to >= space.modes) {
    throw std::out_of_range("mode index out of range");
  }
  std::vector<std::size_t> perm(space.dimension());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    perm[i] = space.index(swapped_modes(space.photons(i), from, to));
  }
  return perm;
}

NetworkOutput finish(const FockSpace& space, Eigen::MatrixXcd unnormalized) {
  NetworkOutput out;
  out.probability = std::max(unnormalized.trace().real(), 0.0);
  if (out.probability < kImpossibleThreshold) return out;
  DensityOperator state(space, unnormalized / out.probability);
  state.symmetrize();
  out.state = std::move(state);
  return out;
}

}  // namespace

std::size_t FockSpace::dimension() const {
  return integer_power(cutoff, modes);
}

std::size_t FockSpace::index(std::span<const std::size_t> photons) const {
  if (photons.size() != modes) {
    throw std::invalid_argument("photon tuple has the wrong number of modes");
  }
  std::size_t idx = 0;
  for (std::size_t n : photons) {
    if (n >= cutoff) throw std::out_of_range("photon number beyond cutoff");
    idx = idx * cutoff + n;
  }
  return idx;
}

Tuple FockSpace::photons(std::size_t index) const {
  Tuple t(modes);
  for (std::size_t j = modes; j-- > 0;) {
    t[j] = index % cutoff;
    index /= cutoff;
  }
  return t;
}

FockStateVector FockStateVector::vacuum(FockSpace space) {
  return basis(space, Tuple(space.modes, 0));
}

FockStateVector FockStateVector::basis(FockSpace space,
                                       std::span<const std::size_t> photons) {
  FockStateVector out{space, Eigen::VectorXcd::Zero(
                                 static_cast<Eigen::Index>(space.dimension()))};
  out.amplitudes(static_cast<Eigen::Index>(space.index(photons))) = 1.0;
  return out;
}

FockStateVector tensor(const FockStateVector& a, const FockStateVector& b) {
  if (a.space.cutoff != b.space.cutoff) {
    throw std::invalid_argument("tensor factors need a common cutoff");
  }
  FockSpace joint{a.space.modes + b.space.modes, a.space.cutoff};
  Eigen::VectorXcd amps(a.amplitudes.size() * b.amplitudes.size());
  for (Eigen::Index i = 0; i < a.amplitudes.size(); ++i) {
    amps.segment(i * b.amplitudes.size(), b.amplitudes.size()) =
        a.amplitudes(i) * b.amplitudes;
  }
  return {joint, std::move(amps)};
}

DensityOperator::DensityOperator(FockSpace space, Eigen::MatrixXcd matrix)
    : space_(space), matrix_(std::move(matrix)) {
  const auto dim = static_cast<Eigen::Index>(space_.dimension());
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    throw std::invalid_argument("density matrix does not match its space");
  }
}

DensityOperator DensityOperator::pure(const FockStateVector& state) {
  return DensityOperator(state.space,
                         state.amplitudes * state.amplitudes.adjoint());
}

DensityOperator DensityOperator::mixture(
    std::span<const FockStateVector> states, std::span<const double> weights) {
  if (states.empty() || states.size() != weights.size()) {
    throw std::invalid_argument("need one weight per state");
  }
  const auto dim = static_cast<Eigen::Index>(states.front().space.dimension());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!(states[i].space == states.front().space)) {
      throw std::invalid_argument("mixture components live in different spaces");
    }
    rho.noalias() +=
        weights[i] * states[i].amplitudes * states[i].amplitudes.adjoint();
  }
  return DensityOperator(states.front().space, std::move(rho));
}

void DensityOperator::validate(double tolerance) const {
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > tolerance) {
    throw std::domain_error("density operator is not Hermitian");
  }
  if (std::abs(matrix_.trace() - Complex(1.0)) > tolerance) {
    throw std::domain_error("density operator trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      matrix_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -tolerance) {
    throw std::domain_error("density operator has a negative eigenvalue");
  }
}

void DensityOperator::symmetrize() {
  matrix_ = (0.5 * (matrix_ + matrix_.adjoint())).eval();
}

DensityOperator DensityOperator::normalized() const {
  const double t = trace();
  if (!(t > 0.0)) throw std::domain_error("cannot normalize a zero operator");
  return DensityOperator(space_, matrix_ / t);
}

void EigenstateSpec::validate() const {
  for (std::size_t label = 0; label < coeffs.size(); ++label) {
    double total = 0.0;
    for (const auto& entry : coeffs[label]) {
      if (entry.l.size() != modes) {
        throw std::invalid_argument("block tuple length differs from N");
      }
      total += std::norm(entry.c);
    }
    if (std::abs(total - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg << "coefficients of label " << label << " are not normalized";
      throw std::invalid_argument(msg.str());
    }
  }
}

EigenstateSpec random_eigenstate_spec(std::size_t order, std::size_t modes,
                                      std::size_t labels, std::size_t blocks,
                                      std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  EigenstateSpec spec{order, modes, {}};
  spec.coeffs.resize(labels);
  for (auto& entries : spec.coeffs) {
    double total = 0.0;
    for_each_tuple(blocks, modes, [&](const Tuple& l) {
      const Complex c(gauss(rng), gauss(rng));
      total += std::norm(c);
      entries.push_back({l, c});
    });
    for (auto& entry : entries) entry.c /= std::sqrt(total);
  }
  return spec;
}

FockStateVector build_eigenstate(const EigenstateSpec& spec, std::size_t n,
                                 std::size_t cutoff) {
  spec.validate();
  if (n > spec.order || n >= spec.coeffs.size()) {
    throw std::out_of_range("eigenstate label out of range");
  }
  const FockSpace space{spec.modes, cutoff};
  FockStateVector out{space, Eigen::VectorXcd::Zero(
                                 static_cast<Eigen::Index>(space.dimension()))};
  const double prefactor =
      std::pow(static_cast<double>(spec.order + 1),
               (1.0 - static_cast<double>(spec.modes)) / 2.0);
  Tuple photons(spec.modes);
  for_each_tuple(spec.order + 1, spec.modes, [&](const Tuple& ns) {
    std::int64_t sum = 0;
    for (std::size_t v : ns) sum += static_cast<std::int64_t>(v);
    if (mod_index(sum, spec.order) != n) return;
    for (const auto& entry : spec.coeffs[n]) {
      for (std::size_t j = 0; j < spec.modes; ++j) {
        photons[j] = checked_photons(entry.l[j], ns[j], spec.order, cutoff, j);
      }
      out.amplitudes(static_cast<Eigen::Index>(space.index(photons))) +=
          prefactor * entry.c;
    }
  });
  return out;
}

FockStateVector build_product_eigenstate(const EigenstateSpec& spec,
                                         std::span<const std::size_t> n_tuple,
                                         std::size_t cutoff) {
  spec.validate();
  if (n_tuple.size() != spec.modes) {
    throw std::invalid_argument("n-tuple length differs from N");
  }
  std::size_t label = 0;
  for (std::size_t v : n_tuple) {
    if (v > spec.order) throw std::out_of_range("n-tuple entry exceeds M");
    label = label * (spec.order + 1) + v;
  }
  if (label >= spec.coeffs.size()) {
    throw std::out_of_range("no coefficients for this n-tuple");
  }
  const FockSpace space{spec.modes, cutoff};
  FockStateVector out{space, Eigen::VectorXcd::Zero(
                                 static_cast<Eigen::Index>(space.dimension()))};
  Tuple photons(spec.modes);
  for (const auto& entry : spec.coeffs[label]) {
    for (std::size_t j = 0; j < spec.modes; ++j) {
      photons[j] =
          checked_photons(entry.l[j], n_tuple[j], spec.order, cutoff, j);
    }
    out.amplitudes(static_cast<Eigen::Index>(space.index(photons))) += entry.c;
  }
  return out;
}

Eigen::MatrixXcd dft_matrix(std::size_t order) {
  const auto size = static_cast<Eigen::Index>(order + 1);
  const double scale = 1.0 / std::sqrt(static_cast<double>(order + 1));
  Eigen::MatrixXcd u(size, size);
  for (Eigen::Index k = 0; k < size; ++k) {
    for (Eigen::Index l = 0; l < size; ++l) {
      u(k, l) = scale * root_of_unity(k * l, order);
    }
  }
  return u;
}

PairDiagonal kerr_projector_block(std::size_t k, std::size_t order,
                                  std::size_t cutoff) {
  if (k > order) throw std::out_of_range("k exceeds truncation order");
  PairDiagonal block(static_cast<Eigen::Index>(cutoff * cutoff));
  const double scale = 1.0 / static_cast<double>(order + 1);
  for (std::size_t a = 0; a < cutoff; ++a) {
    for (std::size_t b = 0; b < cutoff; ++b) {
      const auto d = static_cast<std::int64_t>(a) -
                     static_cast<std::int64_t>(b) -
                     static_cast<std::int64_t>(k);
      Complex sum = 0.0;
      for (std::size_t m = 0; m <= order; ++m) {
        sum += root_of_unity(static_cast<std::int64_t>(m) * d, order);
      }
      block.diagonal()(static_cast<Eigen::Index>(a * cutoff + b)) =
          scale * sum;
    }
  }
  return block;
}

PairDiagonal repeater_operator(std::size_t k, std::size_t m, std::size_t order,
                               std::size_t cutoff) {
  if (m > order) throw std::out_of_range("m exceeds truncation order");
  PairDiagonal op = kerr_projector_block(k, order, cutoff);
  for (std::size_t a = 0; a < cutoff; ++a) {
    const Complex phase =
        root_of_unity(static_cast<std::int64_t>(m * a), order);
    for (std::size_t b = 0; b < cutoff; ++b) {
      op.diagonal()(static_cast<Eigen::Index>(a * cutoff + b)) *= phase;
    }
  }
  return op;
}

Eigen::MatrixXcd povm_element(std::size_t m, std::size_t order,
                              std::size_t cutoff) {
  if (m > order) throw std::out_of_range("m exceeds truncation order");
  require_complete_blocks(order, cutoff);
  const auto dim = static_cast<Eigen::Index>(cutoff);
  Eigen::MatrixXcd pi = Eigen::MatrixXcd::Zero(dim, dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(order + 1));
  for (std::size_t l = 0; l < cutoff / (order + 1); ++l) {
    Eigen::VectorXcd phase_state = Eigen::VectorXcd::Zero(dim);
    for (std::size_t n = 0; n <= order; ++n) {
      phase_state(static_cast<Eigen::Index>(l * (order + 1) + n)) =
          scale * root_of_unity(static_cast<std::int64_t>(m * n), order);
    }
    pi.noalias() += phase_state * phase_state.adjoint();
  }
  return pi;
}

std::size_t RepeaterOutcome::outcome_class(std::size_t order) const {
  std::int64_t sum = 0;
  for (std::size_t v : k) sum += static_cast<std::int64_t>(v);
  return mod_index(sum, order);
}

Eigen::MatrixXcd network_output_unnormalized(const DensityOperator& signal,
                                             const DensityOperator& copy,
                                             const RepeaterOutcome& outcome,
                                             std::size_t order) {
  const FockSpace& space = signal.space();
  if (!(copy.space() == space)) {
    throw std::invalid_argument("signal and copy spaces differ");
  }
  if (outcome.k.size() != space.modes || outcome.m.size() != space.modes) {
    throw std::invalid_argument("outcome needs one (k, m) per mode");
  }
  require_complete_blocks(order, space.cutoff);

  std::vector<PairDiagonal> pairs;
  pairs.reserve(space.modes);
  Eigen::MatrixXcd povm = Eigen::MatrixXcd::Ones(1, 1);
  for (std::size_t j = 0; j < space.modes; ++j) {
    pairs.push_back(
        repeater_operator(outcome.k[j], outcome.m[j], order, space.cutoff));
    povm = kron(povm, povm_element(outcome.m[j], order, space.cutoff));
  }
  // Y is photon-number diagonal on I (x) II, so
  //   Tr_II[Y (R (x) rho) Y^dagger Pi](a, a')
  //     = R(a, a') sum_{b,b'} Y(a,b) rho(b,b') Pi(b',b) conj(Y(a',b')).
  const Eigen::MatrixXcd y = coupling_matrix(space, pairs, false);
  const Eigen::MatrixXcd weighted =
      copy.matrix().cwiseProduct(povm.transpose());
  const Eigen::MatrixXcd transferred = y * weighted * y.adjoint();
  return signal.matrix().cwiseProduct(transferred);
}

NetworkOutput network_output(const DensityOperator& signal,
                             const DensityOperator& copy,
                             const RepeaterOutcome& outcome,
                             std::size_t order) {
  return finish(signal.space(),
                network_output_unnormalized(signal, copy, outcome, order));
}

NetworkOutput outcome_class_output(const DensityOperator& signal,
                                   const DensityOperator& copy, std::size_t k,
                                   std::size_t order) {
  if (k > order) throw std::out_of_range("k exceeds truncation order");
  const FockSpace& space = signal.space();
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(dim, dim);
  for_each_tuple(order + 1, space.modes, [&](const Tuple& ks) {
    RepeaterOutcome outcome{ks, {}};
    if (outcome.outcome_class(order) != k) return;
    for_each_tuple(order + 1, space.modes, [&](const Tuple& ms) {
      outcome.m = ms;
      total += network_output_unnormalized(signal, copy, outcome, order);
    });
  });
  return finish(space, std::move(total));
}

NetworkOutput single_instant_output(const DensityOperator& signal,
                                    std::span<const std::size_t> k,
                                    std::size_t order) {
  const FockSpace& space = signal.space();
  if (k.size() != space.modes) {
    throw std::invalid_argument("need one k per mode");
  }
  std::vector<PairDiagonal> pairs;
  pairs.reserve(space.modes);
  for (std::size_t j = 0; j < space.modes; ++j) {
    pairs.push_back(repeater_operator(k[j], 0, order, space.cutoff));
  }
  // Copy modes stay in vacuum, so only the b = 0 column of Y contributes.
  const Eigen::MatrixXcd y = coupling_matrix(space, pairs, true);
  return finish(space, signal.matrix().cwiseProduct(y * y.adjoint()));
}

FockStateVector mode_transfer(const FockStateVector& state, std::size_t from,
                              std::size_t to) {
  const auto perm = transfer_permutation(state.space, from, to);
  FockStateVector out{state.space,
                      Eigen::VectorXcd(state.amplitudes.size())};
  for (std::size_t i = 0; i < perm.size(); ++i) {
    out.amplitudes(static_cast<Eigen::Index>(i)) =
        state.amplitudes(static_cast<Eigen::Index>(perm[i]));
  }
  return out;
}

DensityOperator mode_transfer(const DensityOperator& state, std::size_t from,
                              std::size_t to) {
  const auto perm = transfer_permutation(state.space(), from, to);
  const auto dim = static_cast<Eigen::Index>(perm.size());
  Eigen::MatrixXcd out(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      out(i, j) = state.matrix()(static_cast<Eigen::Index>(perm[i]),
                                 static_cast<Eigen::Index>(perm[j]));
    }
  }
  return DensityOperator(state.space(), std::move(out));
}

FockStateVector leading_factor(const FockStateVector& state,
                               std::size_t modes) {
  if (modes > state.space.modes) throw std::out_of_range("too many modes");
  const FockSpace lead{modes, state.space.cutoff};
  const std::size_t trailing =
      integer_power(state.space.cutoff, state.space.modes - modes);
  FockStateVector out{lead, Eigen::VectorXcd::Zero(
                                static_cast<Eigen::Index>(lead.dimension()))};
  for (std::size_t i = 0; i < state.space.dimension(); ++i) {
    const Complex amp = state.amplitudes(static_cast<Eigen::Index>(i));
    if (i % trailing == 0) {
      out.amplitudes(static_cast<Eigen::Index>(i / trailing)) = amp;
    } else if (std::abs(amp) > 1e-12) {
      throw std::domain_error("trailing modes are not in vacuum");
    }
  }
  return out;
}

double fidelity(const DensityOperator& a, const DensityOperator& b) {
  if (!(a.space() == b.space())) {
    throw std::invalid_argument("fidelity needs operators on the same space");
  }
  auto rank_one = [](const DensityOperator& op) {
    const double t = op.trace();
    const double t2 = (op.matrix() * op.matrix()).trace().real();
    return std::abs(t2 - t * t) <= 1e-12 * t * t;
  };
  double f = 0.0;
  if (rank_one(a) || rank_one(b)) {
    // For a = |psi><psi| the Uhlmann fidelity is <psi|b|psi> = Tr(a b).
    f = (a.matrix() * b.matrix()).trace().real();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sa(a.matrix());
    const Eigen::VectorXd root =
        sa.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXcd sqrt_a =
        sa.eigenvectors() * root.asDiagonal() * sa.eigenvectors().adjoint();
    Eigen::MatrixXcd inner = sqrt_a * b.matrix() * sqrt_a;
    inner = (0.5 * (inner + inner.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> si(inner,
                                                       Eigen::EigenvaluesOnly);
    const double s = si.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    f = s * s;
  }
  return std::clamp(f, 0.0, 1.0);
}

Eigen::MatrixXcd index_rotation(std::span<const FockStateVector> eigenstates) {
  if (eigenstates.empty()) throw std::invalid_argument("no eigenstates");
  const auto dim = eigenstates.front().amplitudes.size();
  Eigen::MatrixXcd w_dagger = Eigen::MatrixXcd::Zero(dim, dim);
  const std::size_t count = eigenstates.size();
  for (std::size_t n = 0; n < count; ++n) {
    w_dagger.noalias() += eigenstates[(n + 1) % count].amplitudes *
                          eigenstates[n].amplitudes.adjoint();
  }
  return w_dagger.adjoint();
}

}  // namespace purify::oracle
