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

#include "pcl_sr/losses.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "pcl_sr/error.h"

namespace pcl_sr {

GradientField::GradientField(size_t width, size_t height, size_t channels)
    : planes_(channels, Plane(width, height)) {}

GradientField::GradientField(std::vector<Plane> planes)
    : planes_(std::move(planes)) {
  for (const Plane& p : planes_) {
    for (double v : p.data()) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNumericFailure, "non-finite gradient entry");
      }
    }
  }
}

void GradientField::AddScaled(const GradientField& other, double scale) {
  CheckSameShape(planes_, other.planes_, "GradientField::AddScaled");
  for (size_t c = 0; c < planes_.size(); ++c) {
    auto dst = planes_[c].data();
    auto src = other.planes_[c].data();
    for (size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
  }
}

double GradientField::MaxAbs() const {
  double m = 0.0;
  for (const Plane& p : planes_) {
    for (double v : p.data()) m = std::max(m, std::abs(v));
  }
  return m;
}

void LossWeights::Validate() const {
  const double w[] = {content, differential, dct, adversarial};
  bool any_positive = false;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "loss weights must be finite and non-negative");
    }
    any_positive |= v > 0.0;
  }
  if (!any_positive) {
    throw Error(ErrorCode::kInvalidArgument,
                "at least one loss weight must be positive");
  }
}

namespace {

// Charbonnier penalty shifted to vanish at r = 0, sqrt(r^2 + eps^2) - eps,
// and its derivative. With eps = 0 these are |r| and sign(r).
double Smoothed(double r, double eps) {
  if (eps == 0.0) return std::abs(r);
  return r * r / (std::sqrt(r * r + eps * eps) + eps);
}

double SmoothedSlope(double r, double eps) {
  if (eps == 0.0) return r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
  return r / std::sqrt(r * r + eps * eps);
}

void CheckEps(SmoothingEps eps) {
  if (!(eps.eps >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "smoothing eps must be >= 0");
  }
}

double PixelCount(const Plane& p) {
  return static_cast<double>(p.width()) * static_cast<double>(p.height());
}

double ContentValue(std::span<const Plane> hr, std::span<const Plane> sr,
                    double eps) {
  CheckSameShape(hr, sr, "content loss");
  double total = 0.0;
  for (size_t c = 0; c < hr.size(); ++c) {
    auto a = hr[c].data();
    auto b = sr[c].data();
    double sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i) sum += Smoothed(a[i] - b[i], eps);
    total += sum / PixelCount(hr[c]);
  }
  return total / static_cast<double>(hr.size());
}

void CheckDifferentiable(const Plane& p) {
  if (p.width() < 2 && p.height() < 2) {
    throw Error(ErrorCode::kTooSmall,
                "differential content loss needs at least two pixels along "
                "one axis");
  }
}

double DifferentialValue(std::span<const Plane> hr, std::span<const Plane> sr,
                         double eps) {
  CheckSameShape(hr, sr, "differential content loss");
  CheckDifferentiable(hr[0]);
  double total = 0.0;
  for (size_t c = 0; c < hr.size(); ++c) {
    const Plane& a = hr[c];
    const Plane& b = sr[c];
    const size_t w = a.width();
    const size_t h = a.height();
    double sum = 0.0;
    for (size_t y = 0; y < h; ++y) {
      for (size_t x = 0; x + 1 < w; ++x) {
        const double r =
            (a.at(x + 1, y) - a.at(x, y)) - (b.at(x + 1, y) - b.at(x, y));
        sum += Smoothed(r, eps);
      }
    }
    for (size_t y = 0; y + 1 < h; ++y) {
      for (size_t x = 0; x < w; ++x) {
        const double r =
            (a.at(x, y + 1) - a.at(x, y)) - (b.at(x, y + 1) - b.at(x, y));
        sum += Smoothed(r, eps);
      }
    }
    total += sum / PixelCount(a);
  }
  return total / static_cast<double>(hr.size());
}

}  // namespace

double ContentLoss(std::span<const Plane> hr, std::span<const Plane> sr) {
  return ContentValue(hr, sr, 0.0);
}

GradientField ContentLossGrad(std::span<const Plane> hr,
                              std::span<const Plane> sr, SmoothingEps eps) {
  CheckEps(eps);
  CheckSameShape(hr, sr, "content loss gradient");
  std::vector<Plane> grad;
  const double nc = static_cast<double>(hr.size());
  for (size_t c = 0; c < hr.size(); ++c) {
    Plane g(hr[c].width(), hr[c].height());
    const double scale = 1.0 / (PixelCount(hr[c]) * nc);
    auto a = hr[c].data();
    auto b = sr[c].data();
    auto out = g.data();
    for (size_t i = 0; i < a.size(); ++i) {
      out[i] = -scale * SmoothedSlope(a[i] - b[i], eps.eps);
    }
    grad.push_back(std::move(g));
  }
  return GradientField(std::move(grad));
}

double DifferentialContentLoss(std::span<const Plane> hr,
                               std::span<const Plane> sr) {
  return DifferentialValue(hr, sr, 0.0);
}

GradientField DifferentialContentLossGrad(std::span<const Plane> hr,
                                          std::span<const Plane> sr,
                                          SmoothingEps eps) {
  CheckEps(eps);
  CheckSameShape(hr, sr, "differential content loss gradient");
  CheckDifferentiable(hr[0]);
  std::vector<Plane> grad;
  const double nc = static_cast<double>(hr.size());
  for (size_t c = 0; c < hr.size(); ++c) {
    const Plane& a = hr[c];
    const Plane& b = sr[c];
    const size_t w = a.width();
    const size_t h = a.height();
    const double scale = 1.0 / (PixelCount(a) * nc);
    Plane g(w, h);
    // r = d(hr) - d(sr) with d(sr) = sr[next] - sr[cur], so the residual
    // slope s pushes +s onto sr[cur] and -s onto sr[next].
    for (size_t y = 0; y < h; ++y) {
      for (size_t x = 0; x + 1 < w; ++x) {
        const double r =
            (a.at(x + 1, y) - a.at(x, y)) - (b.at(x + 1, y) - b.at(x, y));
        const double s = scale * SmoothedSlope(r, eps.eps);
        g.at(x, y) += s;
        g.at(x + 1, y) -= s;
      }
    }
    for (size_t y = 0; y + 1 < h; ++y) {
      for (size_t x = 0; x < w; ++x) {
        const double r =
            (a.at(x, y + 1) - a.at(x, y)) - (b.at(x, y + 1) - b.at(x, y));
        const double s = scale * SmoothedSlope(r, eps.eps);
        g.at(x, y) += s;
        g.at(x, y + 1) -= s;
      }
    }
    grad.push_back(std::move(g));
  }
  return GradientField(std::move(grad));
}

namespace {

// DCT(hr) - DCT(sr), computed as DCT(hr - sr) since the transform is linear.
Plane CoefficientResidual(const Plane& hr, const Plane& sr,
                          const DctConfig& cfg) {
  Plane diff(hr.width(), hr.height());
  auto a = hr.data();
  auto b = sr.data();
  auto d = diff.data();
  for (size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
  return Dct2(diff, cfg);
}

}  // namespace

double DctLoss(std::span<const Plane> hr, std::span<const Plane> sr,
               const DctConfig& cfg) {
  CheckSameShape(hr, sr, "DCT loss");
  double total = 0.0;
  for (size_t c = 0; c < hr.size(); ++c) {
    const Plane res = CoefficientResidual(hr[c], sr[c], cfg);
    double sum = 0.0;
    for (double v : res.data()) sum += v * v;
    total += sum / PixelCount(hr[c]);
  }
  return total / static_cast<double>(hr.size());
}

GradientField DctLossGrad(std::span<const Plane> hr, std::span<const Plane> sr,
                          const DctConfig& cfg) {
  CheckSameShape(hr, sr, "DCT loss gradient");
  std::vector<Plane> grad;
  const double nc = static_cast<double>(hr.size());
  for (size_t c = 0; c < hr.size(); ++c) {
    const Plane res = CoefficientResidual(hr[c], sr[c], cfg);
    Plane g = Dct2Adjoint(res, cfg, hr[c].width(), hr[c].height());
    const double scale = -2.0 / (PixelCount(hr[c]) * nc);
    for (double& v : g.data()) v *= scale;
    grad.push_back(std::move(g));
  }
  return GradientField(std::move(grad));
}

double AdversarialLoss(const DiscriminatorOutput& d) {
  if (d.form == DiscriminatorForm::kLogit) {
    if (!std::isfinite(d.value)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "discriminator logit not finite");
    }
    // softplus(-z), split so exp never overflows.
    const double z = d.value;
    return z <= 0.0 ? -z + std::log1p(std::exp(z)) : std::log1p(std::exp(-z));
  }
  if (d.value == 0.0) {
    throw Error(ErrorCode::kNumericFailure,
                "adversarial loss diverged: discriminator probability is 0");
  }
  if (!(d.value > 0.0 && d.value <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "discriminator probability must lie in (0, 1]");
  }
  return -std::log(d.value);
}

double AdversarialLossLogitGrad(double logit) {
  // sigmoid(z) - 1 = -sigmoid(-z)
  if (logit >= 0.0) {
    const double e = std::exp(-logit);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(logit));
}

CombinedLoss ComputeCombinedLoss(std::span<const Plane> hr,
                                 std::span<const Plane> sr,
                                 const LossWeights& weights,
                                 const DctConfig& cfg, SmoothingEps eps,
                                 std::optional<DiscriminatorOutput> d) {
  weights.Validate();
  CheckEps(eps);
  CheckSameShape(hr, sr, "combined loss");
  if (weights.adversarial > 0.0 && !d.has_value()) {
    throw Error(ErrorCode::kInvalidArgument,
                "adversarial weight is positive but no discriminator output "
                "was given");
  }

  CombinedLoss out;
  LossReport& r = out.report;
  r.content = ContentLoss(hr, sr);
  r.differential = DifferentialContentLoss(hr, sr);
  r.dct = DctLoss(hr, sr, cfg);
  if (d.has_value()) r.adversarial = AdversarialLoss(*d);
  r.total = weights.content * r.content +
            weights.differential * r.differential + weights.dct * r.dct +
            (r.adversarial ? weights.adversarial * *r.adversarial : 0.0);

  out.gradient = WeightedContentGradient(hr, sr, weights, cfg, eps);
  return out;
}

GradientField WeightedContentGradient(std::span<const Plane> hr,
                                      std::span<const Plane> sr,
                                      const LossWeights& weights,
                                      const DctConfig& cfg, SmoothingEps eps) {
  CheckSameShape(hr, sr, "weighted gradient");
  GradientField g(hr[0].width(), hr[0].height(), hr.size());
  if (weights.content > 0.0) {
    g.AddScaled(ContentLossGrad(hr, sr, eps), weights.content);
  }
  if (weights.differential > 0.0) {
    g.AddScaled(DifferentialContentLossGrad(hr, sr, eps), weights.differential);
  }
  if (weights.dct > 0.0) g.AddScaled(DctLossGrad(hr, sr, cfg), weights.dct);
  return g;
}

double SmoothedObjective(std::span<const Plane> hr, std::span<const Plane> sr,
                         const LossWeights& weights, const DctConfig& cfg,
                         SmoothingEps eps) {
  CheckEps(eps);
  double total = 0.0;
  if (weights.content > 0.0) {
    total += weights.content * ContentValue(hr, sr, eps.eps);
  }
  if (weights.differential > 0.0) {
    total += weights.differential * DifferentialValue(hr, sr, eps.eps);
  }
  if (weights.dct > 0.0) total += weights.dct * DctLoss(hr, sr, cfg);
  return total;
}

}  // namespace pcl_sr
