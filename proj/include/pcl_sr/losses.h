// Copyright 2026 The pcl-srtool Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Perceptual content losses for SR training and their analytic gradients.
//
// All image losses take the HR and SR images as spans of planes (one per
// channel) so that ImageBuffer, LumaPlane and raw, unclamped planes can all
// be fed in. Every loss is normalised by 1/(W*H) and averaged over
// channels. Gradients are taken with respect to the SR image.
//
// L1 terms are reported exactly; gradients use the Charbonnier surrogate
// sqrt(r^2 + eps^2), which reduces to the sign subgradient (0 at ties) when
// eps = 0. Smoothed objective values subtract eps per term so that they are
// zero at hr = sr; this does not change the gradient.

#ifndef PCL_SR_LOSSES_H_
#define PCL_SR_LOSSES_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pcl_sr/dct.h"
#include "pcl_sr/image.h"

namespace pcl_sr {

class GradientField {
 public:
  GradientField() = default;
  // Zero field of the given shape.
  GradientField(size_t width, size_t height, size_t channels);
  // Throws kNumericFailure if any entry is not finite.
  explicit GradientField(std::vector<Plane> planes);

  size_t width() const { return planes_.empty() ? 0 : planes_[0].width(); }
  size_t height() const { return planes_.empty() ? 0 : planes_[0].height(); }
  size_t channels() const { return planes_.size(); }
  const Plane& plane(size_t c) const { return planes_[c]; }
  std::span<const Plane> planes() const { return planes_; }

  // this += scale * other
  void AddScaled(const GradientField& other, double scale);
  double MaxAbs() const;

 private:
  std::vector<Plane> planes_;
};

struct LossWeights {
  double content = 1.0;
  double differential = 1.0;
  double dct = 1.0;
  double adversarial = 0.001;

  // Throws kInvalidArgument unless all weights are non-negative and at least
  // one is positive.
  void Validate() const;
};

struct SmoothingEps {
  double eps = 1e-6;
};

// l_c: mean absolute difference.
double ContentLoss(std::span<const Plane> hr, std::span<const Plane> sr);
GradientField ContentLossGrad(std::span<const Plane> hr,
                              std::span<const Plane> sr, SmoothingEps eps);

// l_d: L1 distance between forward differences, summed over the
// (W-1) x H horizontal and W x (H-1) vertical grids, scaled by 1/(W*H).
// Requires at least one dimension of 2 or more.
double DifferentialContentLoss(std::span<const Plane> hr,
                               std::span<const Plane> sr);
GradientField DifferentialContentLossGrad(std::span<const Plane> hr,
                                          std::span<const Plane> sr,
                                          SmoothingEps eps);

// l_dct: mean squared difference of DCT coefficients (divided by the
// original W*H in blockwise mode too).
double DctLoss(std::span<const Plane> hr, std::span<const Plane> sr,
               const DctConfig& cfg);
GradientField DctLossGrad(std::span<const Plane> hr, std::span<const Plane> sr,
                          const DctConfig& cfg);

enum class DiscriminatorForm { kProbability, kLogit };

struct DiscriminatorOutput {
  double value = 1.0;
  DiscriminatorForm form = DiscriminatorForm::kProbability;
};

// l_D = -ln(d) for a probability, softplus(-d) for a logit. A probability of
// 0 is reported as a diverged loss (kNumericFailure); anything else outside
// (0, 1] is kInvalidArgument.
double AdversarialLoss(const DiscriminatorOutput& d);

// d l_D / d logit = sigmoid(logit) - 1.
double AdversarialLossLogitGrad(double logit);

struct LossReport {
  double content = 0.0;
  double differential = 0.0;
  double dct = 0.0;
  std::optional<double> adversarial;
  double total = 0.0;
};

struct CombinedLoss {
  LossReport report;
  GradientField gradient;
};

// Evaluates all losses and the weighted gradient of the three content terms.
// A discriminator output is required when weights.adversarial > 0; the
// adversarial term only enters the report.
CombinedLoss ComputeCombinedLoss(std::span<const Plane> hr,
                                 std::span<const Plane> sr,
                                 const LossWeights& weights,
                                 const DctConfig& cfg, SmoothingEps eps,
                                 std::optional<DiscriminatorOutput> d = {});

// w_c * grad l_c + w_d * grad l_d + w_dct * grad l_dct.
GradientField WeightedContentGradient(std::span<const Plane> hr,
                                      std::span<const Plane> sr,
                                      const LossWeights& weights,
                                      const DctConfig& cfg, SmoothingEps eps);

// Weighted Charbonnier-smoothed objective that ComputeCombinedLoss
// differentiates (adversarial term excluded). Equal to report.total minus the
// adversarial part when eps = 0.
double SmoothedObjective(std::span<const Plane> hr, std::span<const Plane> sr,
                         const LossWeights& weights, const DctConfig& cfg,
                         SmoothingEps eps);

}  // namespace pcl_sr

#endif  // PCL_SR_LOSSES_H_
