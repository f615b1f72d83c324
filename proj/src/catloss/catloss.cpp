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

#include "purify/catloss.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace purify::cat {

namespace {

void require_purity(double value, const char* name) {
  if (!(std::abs(value) <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must satisfy |.| <= 1");
  }
}

}  // namespace

double CatMixture::intensity() const {
  double total = 0.0;
  for (const auto& a : alphas) total += std::norm(a);
  return total;
}

double CatMixture::overlap() const { return std::exp(-2.0 * intensity()); }

void CatMixture::validate() const {
  if (alphas.empty()) throw std::invalid_argument("cat needs at least one mode");
  require_purity(r, "r");
}

double LossChannel::mean_eta() const {
  if (etas.empty()) return 0.0;
  return std::accumulate(etas.begin(), etas.end(), 0.0) /
         static_cast<double>(etas.size());
}

void LossChannel::validate() const {
  for (double eta : etas) {
    if (!(eta >= 0.0)) throw std::invalid_argument("loss rates must be >= 0");
  }
  if (!(length > 0.0)) throw std::invalid_argument("L must be > 0");
  if (!(distance >= 0.0)) throw std::invalid_argument("x must be >= 0");
}

void FeedbackModel::validate() const {
  if (!(eta_f >= 0.0 && eta_f <= 1.0)) {
    throw std::invalid_argument("eta_F must lie in [0, 1]");
  }
}

std::pair<double, double> eigenvalues(double r, double overlap) {
  require_purity(r, "r");
  if (!(overlap >= 0.0 && overlap <= 1.0)) {
    throw std::invalid_argument("overlap must lie in [0, 1]");
  }
  const double norm = 2.0 * (1.0 + r * overlap);
  if (norm == 0.0) {
    // r = -1 at e = 1: both coherent states coincide and the mixture is
    // undefined.
    throw std::domain_error("cat mixture is not normalizable (r e = -1)");
  }
  const double p0 = (1.0 + overlap) * (1.0 + r) / norm;
  const double p1 = (1.0 - overlap) * (1.0 - r) / norm;
  return {p0, p1};
}

std::pair<double, double> cat_eigensystem(const CatMixture& cat) {
  cat.validate();
  return eigenvalues(cat.r, cat.overlap());
}

MixtureState to_mixture(const CatMixture& cat) {
  const auto [p0, p1] = cat_eigensystem(cat);
  return MixtureState::normalized({p0, p1});
}

double purity_from_mixture(const MixtureState& mixture, double overlap) {
  if (mixture.order() != 1) {
    throw std::invalid_argument("cat mixtures have exactly two eigenstates");
  }
  const double p0 = mixture[0];
  const double denominator = 2.0 * p0 * overlap - 1.0 - overlap;
  if (denominator == 0.0) throw std::domain_error("purity is not determined");
  return (1.0 + overlap - 2.0 * p0) / denominator;
}

CatMixture decohere(const CatMixture& cat, const LossChannel& channel,
                    bool approximate) {
  cat.validate();
  channel.validate();
  if (channel.etas.size() != cat.alphas.size()) {
    throw std::invalid_argument("one loss rate per mode is required");
  }
  const double scaled = channel.distance / channel.length;
  CatMixture out = cat;
  if (approximate) {
    out.r = cat.r * std::exp(-4.0 * cat.intensity() * channel.mean_eta() *
                             scaled);
    return out;
  }
  for (std::size_t j = 0; j < out.alphas.size(); ++j) {
    out.alphas[j] *= std::exp(-channel.etas[j] * scaled);
  }
  out.r = cat.r * std::exp(2.0 * (out.intensity() - cat.intensity()));
  return out;
}

double feedback_efficiency_from_channel(const CatMixture& cat,
                                        const LossChannel& channel,
                                        bool approximate) {
  CatMixture unit = cat;
  unit.r = 1.0;
  return decohere(unit, channel, approximate).r;
}

double purity_step(double R, double r, BinaryEvent event,
                   const FeedbackModel& model, double overlap) {
  require_purity(R, "R");
  require_purity(r, "r");
  model.validate();
  // k != 0 is the k = 0 update with r -> -r; in exact mode also e -> -e.
  const double sign = event == BinaryEvent::kZero ? 1.0 : -1.0;
  const double s = sign * r;
  const double e = model.exact_overlap ? sign * overlap : 0.0;
  const double numerator = R + s + e * (1.0 + R * s);
  const double denominator = 1.0 + R * s + e * (R + s);
  if (!(denominator > 0.0)) {
    throw std::domain_error("purity update has a non-positive denominator");
  }
  return model.eta_f * numerator / denominator;
}

double binary_event_prob_cat(double R, double r, double overlap) {
  const auto [a0, a1] = eigenvalues(R, overlap);
  const auto [b0, b1] = eigenvalues(r, overlap);
  return a0 * b0 + a1 * b1;
}

Bounds stationary_bounds(double r, double eta_f) {
  require_purity(r, "r");
  if (r == 0.0) {
    throw std::domain_error("stationary bounds are singular at r = 0");
  }
  if (!(eta_f > 0.0 && eta_f <= 1.0)) {
    throw std::invalid_argument("eta_F must lie in (0, 1]");
  }
  const double loss = 1.0 - eta_f;
  const double magnitude =
      (std::sqrt(loss * loss + 4.0 * r * r * eta_f) - loss) /
      (2.0 * std::abs(r));
  return {-magnitude, magnitude};
}

double min_feedback_efficiency(double r) {
  require_purity(r, "r");
  return (1.0 + r * r) / 2.0;
}

double required_efficiency(double r, double epsilon) {
  require_purity(r, "r");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  const double a = std::abs(r);
  return 1.0 - 2.0 * epsilon * a / (1.0 + a);
}

}  // namespace purify::cat
