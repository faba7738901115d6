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

// Image-domain descent on the weighted content objective, and sweeps over
// loss weightings that record where each optimum lands in the
// (distortion, naturalness) plane.

#ifndef PCL_SR_PD_EXPLORER_H_
#define PCL_SR_PD_EXPLORER_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcl_sr/dct.h"
#include "pcl_sr/image.h"
#include "pcl_sr/losses.h"
#include "pcl_sr/niqe.h"

namespace pcl_sr {

struct DescentConfig {
  int max_steps = 500;
  // Length of the first trial step, measured as the change of the pixel with
  // the largest gradient component.
  double initial_step = 0.1;
  double backtracking = 0.5;
  // Stop once an accepted step lowers the objective by less than this.
  double stop_tol = 1e-9;
  SmoothingEps eps{1e-3};

  void Validate() const;
};

enum class StopReason {
  kZeroGradient,
  kConverged,  // decrease below stop_tol
  kLineSearchFailed,
  kMaxSteps,
};

const char* StopReasonName(StopReason reason);

struct DescentResult {
  ImageBuffer image;
  // trace[0] is the objective at the start; trace[t] after accepted step t.
  std::vector<double> trace;
  int steps = 0;
  StopReason stop = StopReason::kMaxSteps;
  std::vector<std::string> warnings;
};

// Projected gradient descent with backtracking line search. Each iteration
// first tries twice the previously accepted step, shrinks it by
// `backtracking` until the objective does not increase, and clamps the
// iterate into [0, 1]. A positive adversarial weight is ignored with a
// warning.
DescentResult Descend(const ImageBuffer& hr, const ImageBuffer& start,
                      const LossWeights& weights, const DescentConfig& cfg,
                      const DctConfig& dct_cfg);

struct SweepPoint {
  LossWeights weights;
  double rmse = 0.0;           // 8-bit scale, all channels
  std::optional<double> niqe;  // absent without a model or for tiny images
  LossReport report;           // exact losses of the final image
  int steps = 0;
  std::vector<double> trace;
  std::optional<std::string> error;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // request order
};

// Runs Descend from the same start for every weight setting. A failing point
// records its error and the sweep continues. Up to `threads` points run
// concurrently; the result does not depend on the thread count.
SweepResult Sweep(const ImageBuffer& hr, const ImageBuffer& start,
                  std::span<const LossWeights> weight_list,
                  const DescentConfig& cfg, const DctConfig& dct_cfg,
                  const NiqeModel* niqe_model, size_t threads = 1);

}  // namespace pcl_sr

#endif  // PCL_SR_PD_EXPLORER_H_
