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

// Separable 2-D type-II DCT.
//
// Unnormalised:  X_k = sum_n x_n cos(pi k (2n + 1) / (2N)).
// Orthonormal:   the same basis scaled by sqrt(1/N) for k = 0 and sqrt(2/N)
//                otherwise, so the transform matrix is orthogonal.
//
// Blockwise mode transforms independent 8x8 tiles after replicate-padding the
// plane up to a multiple of 8; its coefficient grid has the padded size.

#ifndef PCL_SR_DCT_H_
#define PCL_SR_DCT_H_

#include <cstddef>
#include <vector>

#include "pcl_sr/image.h"

namespace pcl_sr {

enum class DctNorm { kOrthonormal, kUnnormalized };
enum class DctMode { kFullImage, kBlockwise8x8 };

struct DctConfig {
  DctNorm normalization = DctNorm::kUnnormalized;
  DctMode mode = DctMode::kFullImage;
};

inline constexpr size_t kDctBlockSize = 8;

// Row-major n x n forward basis matrix: entry (k, i) multiplies sample i.
std::vector<double> DctMatrix(size_t n, DctNorm norm);

Plane Dct2(const Plane& plane, const DctConfig& cfg);

// Inverse of Dct2 on its coefficient grid. For blockwise mode the result has
// the padded size; its top-left width x height corner is the original plane.
Plane Idct2(const Plane& coeffs, const DctConfig& cfg);

// Adjoint (transpose) of Dct2 viewed as a linear map from a width x height
// plane to its coefficient grid, including the adjoint of the replicate
// padding in blockwise mode.
Plane Dct2Adjoint(const Plane& coeffs, const DctConfig& cfg, size_t width,
                  size_t height);

}  // namespace pcl_sr

#endif  // PCL_SR_DCT_H_
