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

#include "pcl_sr/pd_explorer.h"

#include <cmath>
#include <utility>

#include "parallel.h"
#include "pcl_sr/error.h"
#include "pcl_sr/image_ops.h"
#include "pcl_sr/metrics.h"

namespace pcl_sr {

void DescentConfig::Validate() const {
  if (max_steps < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_steps must be positive");
  }
  if (!(initial_step > 0.0) || !std::isfinite(initial_step)) {
    throw Error(ErrorCode::kInvalidArgument, "initial_step must be positive");
  }
  if (!(backtracking > 0.0 && backtracking < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "backtracking factor must lie in (0, 1)");
  }
  if (!(stop_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "stop_tol must be positive");
  }
  if (!(eps.eps >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "smoothing eps must be >= 0");
  }
}

const char* StopReasonName(StopReason reason) {
  switch (reason) {
    case StopReason::kZeroGradient:
      return "zero-gradient";
    case StopReason::kConverged:
      return "converged";
    case StopReason::kLineSearchFailed:
      return "line-search-failed";
    case StopReason::kMaxSteps:
      return "max-steps";
  }
  return "unknown";
}

namespace {

// Smallest trial step, relative to the largest gradient entry, before the
// line search gives up.
constexpr double kMinRelativeStep = 1e-16;

std::vector<Plane> StepAndClamp(const std::vector<Plane>& x,
                                const GradientField& g, double step) {
  std::vector<Plane> out = x;
  for (size_t c = 0; c < out.size(); ++c) {
    auto dst = out[c].data();
    auto grad = g.plane(c).data();
    for (size_t i = 0; i < dst.size(); ++i) {
      const double v = dst[i] - step * grad[i];
      dst[i] = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    }
  }
  return out;
}

}  // namespace

DescentResult Descend(const ImageBuffer& hr, const ImageBuffer& start,
                      const LossWeights& weights, const DescentConfig& cfg,
                      const DctConfig& dct_cfg) {
  cfg.Validate();
  if (!hr.SameShape(start)) {
    throw Error(ErrorCode::kShapeMismatch,
                "descent start and HR image differ in shape");
  }
  DescentResult result;
  LossWeights w = weights;
  if (w.adversarial > 0.0) {
    result.warnings.push_back(
        "adversarial weight ignored: no pixel gradient without a "
        "discriminator");
    w.adversarial = 0.0;
  }
  w.Validate();

  const auto target = hr.planes();
  std::vector<Plane> x(start.planes().begin(), start.planes().end());
  double f = SmoothedObjective(target, x, w, dct_cfg, cfg.eps);
  if (!std::isfinite(f)) {
    throw Error(ErrorCode::kNumericFailure, "initial objective not finite");
  }
  result.trace.push_back(f);

  double prev_step = 0.0;  // relative to the gradient's max entry
  result.stop = StopReason::kMaxSteps;
  while (result.steps < cfg.max_steps) {
    const GradientField g =
        WeightedContentGradient(target, x, w, dct_cfg, cfg.eps);
    const double gmax = g.MaxAbs();
    if (gmax == 0.0) {
      result.stop = StopReason::kZeroGradient;
      break;
    }
    double step = result.steps == 0 ? cfg.initial_step : 2.0 * prev_step;
    std::vector<Plane> candidate;
    double fc = 0.0;
    bool accepted = false;
    while (step >= kMinRelativeStep) {
      candidate = StepAndClamp(x, g, step / gmax);
      fc = SmoothedObjective(target, candidate, w, dct_cfg, cfg.eps);
      if (fc <= f) {
        accepted = true;
        break;
      }
      step *= cfg.backtracking;
    }
    if (!accepted) {
      result.stop = StopReason::kLineSearchFailed;
      break;
    }
    const double decrease = f - fc;
    x = std::move(candidate);
    f = fc;
    prev_step = step;
    ++result.steps;
    result.trace.push_back(f);
    if (decrease < cfg.stop_tol) {
      result.stop = StopReason::kConverged;
      break;
    }
  }
  result.image = ImageBuffer(std::move(x));
  return result;
}

SweepResult Sweep(const ImageBuffer& hr, const ImageBuffer& start,
                  std::span<const LossWeights> weight_list,
                  const DescentConfig& cfg, const DctConfig& dct_cfg,
                  const NiqeModel* niqe_model, size_t threads) {
  if (weight_list.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sweep needs at least one point");
  }
  SweepResult result;
  result.points.resize(weight_list.size());
  ParallelFor(weight_list.size(), threads, [&](size_t i) {
    SweepPoint& p = result.points[i];
    p.weights = weight_list[i];
    try {
      DescentResult d = Descend(hr, start, p.weights, cfg, dct_cfg);
      LossWeights reported = p.weights;
      reported.adversarial = 0.0;
      p.report = ComputeCombinedLoss(hr.planes(), d.image.planes(), reported,
                                     dct_cfg, SmoothingEps{0.0})
                     .report;
      p.rmse = Rmse(hr.planes(), d.image.planes());
      const LumaPlane luma = ToLuma(d.image);
      if (niqe_model != nullptr && luma.width() >= niqe_model->patch_size &&
          luma.height() >= niqe_model->patch_size) {
        p.niqe = Niqe(luma, *niqe_model);
      }
      p.steps = d.steps;
      p.trace = std::move(d.trace);
    } catch (const Error& e) {
      p.error = e.what();
    }
  });
  return result;
}

}  // namespace pcl_sr
