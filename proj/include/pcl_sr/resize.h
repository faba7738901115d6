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

// Separable bicubic resampling following the MATLAB imresize conventions
// used by SR benchmarks: cubic convolution with a = -0.5, kernel widened by
// 1/scale when downscaling with antialiasing, pixel-centre alignment
// u = x / s + (1 - 1 / s) / 2, weights normalised to sum to one.

#ifndef PCL_SR_RESIZE_H_
#define PCL_SR_RESIZE_H_

#include <cstddef>
#include <vector>

#include "pcl_sr/image.h"

namespace pcl_sr {

enum class EdgeMode {
  kSymmetric,  // half-sample mirror: ... b a | a b ... (MATLAB imresize)
  kReplicate,  // coordinate clamp
};

struct ResizeOptions {
  bool antialias = true;
  EdgeMode edge = EdgeMode::kSymmetric;
};

// Cubic convolution kernel with a = -0.5.
double CubicKernel(double x);

// Sparse 1-D resampling matrix: output sample i is
// sum_k weights[i][k] * input[indices[i][k]].
struct ResampleWeights {
  std::vector<std::vector<size_t>> indices;
  std::vector<std::vector<double>> weights;
};

ResampleWeights ComputeResampleWeights(size_t in_length, size_t out_length,
                                       const ResizeOptions& options);

// Resizes one unconstrained plane (no clamping).
Plane ResizePlane(const Plane& plane, size_t out_width, size_t out_height,
                  const ResizeOptions& options = {});

// Resizes every channel; the result is clamped to [0, 1].
ImageBuffer BicubicResize(const ImageBuffer& img, size_t out_width,
                          size_t out_height, const ResizeOptions& options = {});

}  // namespace pcl_sr

#endif  // PCL_SR_RESIZE_H_
