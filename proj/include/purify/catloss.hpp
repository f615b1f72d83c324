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
#include <utility>
#include <vector>

#include "purify/core.hpp"

namespace purify::cat {

/// Two-component N-mode cat mixture: equal weights on |alpha> and |-alpha>
/// with coherence r between them.
struct CatMixture {
  std::vector<std::complex<double>> alphas;
  double r = 0.0;

  /// |alpha|^2 summed over modes.
  double intensity() const;
  /// e = <alpha|-alpha> = exp(-2 |alpha|^2).
  double overlap() const;
  void validate() const;
};

/// Per-mode loss rates over a propagation distance x with transparency
/// length L.
struct LossChannel {
  std::vector<double> etas;
  double length = 1.0;
  double distance = 0.0;

  double mean_eta() const;
  void validate() const;
};

struct FeedbackModel {
  double eta_f = 1.0;
  /// Keep the e-dependent terms of the update instead of dropping them.
  bool exact_overlap = false;

  void validate() const;
};

struct Bounds {
  double low;
  double high;
};

/// Eigenvalues (p_0, p_1) of the mixture with purity r and overlap e.
std::pair<double, double> eigenvalues(double r, double overlap);
std::pair<double, double> cat_eigensystem(const CatMixture& cat);

MixtureState to_mixture(const CatMixture& cat);

/// Inverts the eigenvalue relation: the r whose p_0 matches the mixture.
double purity_from_mixture(const MixtureState& mixture, double overlap);

/// Amplitude damping over the channel. The approximate branch keeps the
/// amplitudes and uses the short-distance exponent.
CatMixture decohere(const CatMixture& cat, const LossChannel& channel,
                    bool approximate);

/// r(x) / r(0) for the channel; the per-cycle damping factor of R.
double feedback_efficiency_from_channel(const CatMixture& cat,
                                        const LossChannel& channel,
                                        bool approximate);

/// Binary update of the circulating purity R against a fresh copy with
/// purity r, then damping by eta_F. `overlap` is ignored in mesoscopic mode.
double purity_step(double R, double r, BinaryEvent event,
                   const FeedbackModel& model, double overlap = 0.0);

/// p(0) for circulating purity R and source purity r at overlap e.
double binary_event_prob_cat(double R, double r, double overlap);

/// Fixed points of the lossy recursion; throws for r == 0.
Bounds stationary_bounds(double r, double eta_f);

/// Smallest eta_F that lets |R| grow above |r|.
double min_feedback_efficiency(double r);

/// eta_F needed to keep the upper bound within epsilon of one (first order).
double required_efficiency(double r, double epsilon);

}  // namespace purify::cat
