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

#include "pcl_sr/dct.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pcl_sr/error.h"

namespace pcl_sr {

std::vector<double> DctMatrix(size_t n, DctNorm norm) {
  std::vector<double> m(n * n);
  for (size_t k = 0; k < n; ++k) {
    double s = 1.0;
    if (norm == DctNorm::kOrthonormal) {
      s = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n));
    }
    for (size_t i = 0; i < n; ++i) {
      m[k * n + i] = s * std::cos(std::numbers::pi * static_cast<double>(k) *
                                  (2.0 * static_cast<double>(i) + 1.0) /
                                  (2.0 * static_cast<double>(n)));
    }
  }
  return m;
}

namespace {

// Row-major n x n inverse of DctMatrix(n, norm).
std::vector<double> InverseDctMatrix(size_t n, DctNorm norm) {
  std::vector<double> fwd = DctMatrix(n, norm);
  std::vector<double> inv(n * n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t k = 0; k < n; ++k) {
      double s = 1.0;
      if (norm == DctNorm::kUnnormalized) {
        s = (k == 0 ? 1.0 : 2.0) / static_cast<double>(n);
      }
      inv[i * n + k] = s * fwd[k * n + i];
    }
  }
  return inv;
}

std::vector<double> Transpose(const std::vector<double>& m, size_t n) {
  std::vector<double> t(n * n);
  for (size_t r = 0; r < n; ++r) {
    for (size_t c = 0; c < n; ++c) t[c * n + r] = m[r * n + c];
  }
  return t;
}

// out = My * in * Mx^T on the tile at (x0, y0) of size w x h, where My is
// h x h and Mx is w x w.
void ApplySeparable(const Plane& in, size_t x0, size_t y0, size_t w, size_t h,
                    const std::vector<double>& mx,
                    const std::vector<double>& my, Plane& out) {
  std::vector<double> tmp(w * h);
  for (size_t y = 0; y < h; ++y) {
    const double* row = in.Row(y0 + y) + x0;
    for (size_t k = 0; k < w; ++k) {
      const double* basis = &mx[k * w];
      double acc = 0.0;
      for (size_t i = 0; i < w; ++i) acc += basis[i] * row[i];
      tmp[y * w + k] = acc;
    }
  }
  for (size_t k = 0; k < h; ++k) {
    const double* basis = &my[k * h];
    double* dst = out.Row(y0 + k) + x0;
    std::fill(dst, dst + w, 0.0);
    for (size_t i = 0; i < h; ++i) {
      const double b = basis[i];
      const double* src = &tmp[i * w];
      for (size_t x = 0; x < w; ++x) dst[x] += b * src[x];
    }
  }
}

size_t RoundUpToBlock(size_t n) {
  return (n + kDctBlockSize - 1) / kDctBlockSize * kDctBlockSize;
}

Plane ReplicatePad(const Plane& p, size_t width, size_t height) {
  Plane out(width, height);
  for (size_t y = 0; y < height; ++y) {
    const double* src = p.Row(std::min(y, p.height() - 1));
    double* dst = out.Row(y);
    for (size_t x = 0; x < width; ++x) dst[x] = src[std::min(x, p.width() - 1)];
  }
  return out;
}

// Adjoint of ReplicatePad: padded samples fold back onto the edge pixel they
// were copied from.
Plane ReplicatePadAdjoint(const Plane& padded, size_t width, size_t height) {
  Plane out(width, height);
  for (size_t y = 0; y < padded.height(); ++y) {
    const double* src = padded.Row(y);
    double* dst = out.Row(std::min(y, height - 1));
    for (size_t x = 0; x < padded.width(); ++x) {
      dst[std::min(x, width - 1)] += src[x];
    }
  }
  return out;
}

Plane TransformTiles(const Plane& in, const std::vector<double>& mx,
                     const std::vector<double>& my, size_t tile_w,
                     size_t tile_h) {
  Plane out(in.width(), in.height());
  for (size_t y0 = 0; y0 < in.height(); y0 += tile_h) {
    for (size_t x0 = 0; x0 < in.width(); x0 += tile_w) {
      ApplySeparable(in, x0, y0, tile_w, tile_h, mx, my, out);
    }
  }
  return out;
}

void CheckNonEmpty(const Plane& p) {
  if (p.empty()) throw Error(ErrorCode::kInvalidArgument, "DCT of empty plane");
}

}  // namespace

Plane Dct2(const Plane& plane, const DctConfig& cfg) {
  CheckNonEmpty(plane);
  if (cfg.mode == DctMode::kBlockwise8x8) {
    const Plane padded = ReplicatePad(plane, RoundUpToBlock(plane.width()),
                                      RoundUpToBlock(plane.height()));
    const auto m = DctMatrix(kDctBlockSize, cfg.normalization);
    return TransformTiles(padded, m, m, kDctBlockSize, kDctBlockSize);
  }
  return TransformTiles(plane, DctMatrix(plane.width(), cfg.normalization),
                        DctMatrix(plane.height(), cfg.normalization),
                        plane.width(), plane.height());
}

Plane Idct2(const Plane& coeffs, const DctConfig& cfg) {
  CheckNonEmpty(coeffs);
  if (cfg.mode == DctMode::kBlockwise8x8) {
    if (coeffs.width() % kDctBlockSize != 0 ||
        coeffs.height() % kDctBlockSize != 0) {
      throw Error(ErrorCode::kShapeMismatch,
                  "blockwise coefficient grid must be a multiple of 8");
    }
    const auto m = InverseDctMatrix(kDctBlockSize, cfg.normalization);
    return TransformTiles(coeffs, m, m, kDctBlockSize, kDctBlockSize);
  }
  return TransformTiles(coeffs,
                        InverseDctMatrix(coeffs.width(), cfg.normalization),
                        InverseDctMatrix(coeffs.height(), cfg.normalization),
                        coeffs.width(), coeffs.height());
}

Plane Dct2Adjoint(const Plane& coeffs, const DctConfig& cfg, size_t width,
                  size_t height) {
  CheckNonEmpty(coeffs);
  if (cfg.mode == DctMode::kBlockwise8x8) {
    if (coeffs.width() != RoundUpToBlock(width) ||
        coeffs.height() != RoundUpToBlock(height)) {
      throw Error(ErrorCode::kShapeMismatch,
                  "coefficient grid does not match the padded image size");
    }
    const auto mt =
        Transpose(DctMatrix(kDctBlockSize, cfg.normalization), kDctBlockSize);
    return ReplicatePadAdjoint(
        TransformTiles(coeffs, mt, mt, kDctBlockSize, kDctBlockSize), width,
        height);
  }
  if (coeffs.width() != width || coeffs.height() != height) {
    throw Error(ErrorCode::kShapeMismatch,
                "coefficient grid does not match the image size");
  }
  return TransformTiles(
      coeffs, Transpose(DctMatrix(width, cfg.normalization), width),
      Transpose(DctMatrix(height, cfg.normalization), height), width, height);
}

}  // namespace pcl_sr
