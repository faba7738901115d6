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

#include "pcl_sr/resize.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "pcl_sr/error.h"

namespace pcl_sr {

double CubicKernel(double x) {
  const double ax = std::abs(x);
  const double ax2 = ax * ax;
  const double ax3 = ax2 * ax;
  if (ax <= 1.0) return 1.5 * ax3 - 2.5 * ax2 + 1.0;
  if (ax <= 2.0) return -0.5 * ax3 + 2.5 * ax2 - 4.0 * ax + 2.0;
  return 0.0;
}

namespace {

// Maps an out-of-range (0-based) tap index back into [0, n).
size_t MapIndex(long long i, size_t n, EdgeMode edge) {
  const long long len = static_cast<long long>(n);
  if (edge == EdgeMode::kReplicate)
    return static_cast<size_t>(std::clamp(i, 0LL, len - 1));
  const long long period = 2 * len;
  long long m = i % period;
  if (m < 0) m += period;
  return static_cast<size_t>(m < len ? m : period - 1 - m);
}

}  // namespace

ResampleWeights ComputeResampleWeights(size_t in_length, size_t out_length,
                                       const ResizeOptions& options) {
  if (in_length == 0 || out_length == 0) {
    throw Error(ErrorCode::kInvalidArgument, "resize dimensions must be > 0");
  }
  const double scale =
      static_cast<double>(out_length) / static_cast<double>(in_length);
  const bool widen = options.antialias && scale < 1.0;
  const double kernel_width = widen ? 4.0 / scale : 4.0;
  const int taps = static_cast<int>(std::ceil(kernel_width)) + 2;

  ResampleWeights rw;
  rw.indices.resize(out_length);
  rw.weights.resize(out_length);
  for (size_t i = 0; i < out_length; ++i) {
    // 1-based pixel-centre coordinates, as in imresize.
    const double x = static_cast<double>(i + 1);
    const double u = x / scale + 0.5 * (1.0 - 1.0 / scale);
    const long long left =
        static_cast<long long>(std::floor(u - kernel_width / 2.0));
    std::vector<double> w(taps);
    double sum = 0.0;
    for (int k = 0; k < taps; ++k) {
      const double d = u - static_cast<double>(left + k);
      w[k] = widen ? scale * CubicKernel(scale * d) : CubicKernel(d);
      sum += w[k];
    }
    for (int k = 0; k < taps; ++k) {
      if (w[k] == 0.0) continue;
      rw.indices[i].push_back(MapIndex(left + k - 1, in_length, options.edge));
      rw.weights[i].push_back(w[k] / sum);
    }
  }
  return rw;
}

namespace {

Plane ResizeRows(const Plane& in, size_t out_width, const ResampleWeights& rw) {
  Plane out(out_width, in.height());
  for (size_t y = 0; y < in.height(); ++y) {
    const double* src = in.Row(y);
    double* dst = out.Row(y);
    for (size_t x = 0; x < out_width; ++x) {
      double acc = 0.0;
      const auto& idx = rw.indices[x];
      const auto& w = rw.weights[x];
      for (size_t k = 0; k < idx.size(); ++k) acc += w[k] * src[idx[k]];
      dst[x] = acc;
    }
  }
  return out;
}

Plane ResizeColumns(const Plane& in, size_t out_height,
                    const ResampleWeights& rw) {
  Plane out(in.width(), out_height);
  for (size_t y = 0; y < out_height; ++y) {
    double* dst = out.Row(y);
    const auto& idx = rw.indices[y];
    const auto& w = rw.weights[y];
    for (size_t x = 0; x < in.width(); ++x) {
      double acc = 0.0;
      for (size_t k = 0; k < idx.size(); ++k) acc += w[k] * in.at(x, idx[k]);
      dst[x] = acc;
    }
  }
  return out;
}

}  // namespace

Plane ResizePlane(const Plane& plane, size_t out_width, size_t out_height,
                  const ResizeOptions& options) {
  if (out_width == 0 || out_height == 0) {
    throw Error(ErrorCode::kInvalidArgument, "resize target has zero size");
  }
  if (plane.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot resize an empty plane");
  }
  // imresize processes the dimension with the smaller scale first and the
  // vertical one on ties.
  const double sx = static_cast<double>(out_width) / plane.width();
  const double sy = static_cast<double>(out_height) / plane.height();
  const auto wx = ComputeResampleWeights(plane.width(), out_width, options);
  const auto wy = ComputeResampleWeights(plane.height(), out_height, options);
  if (sx < sy) {
    return ResizeColumns(ResizeRows(plane, out_width, wx), out_height, wy);
  }
  return ResizeRows(ResizeColumns(plane, out_height, wy), out_width, wx);
}

ImageBuffer BicubicResize(const ImageBuffer& img, size_t out_width,
                          size_t out_height, const ResizeOptions& options) {
  std::vector<Plane> planes;
  planes.reserve(img.channels());
  for (const Plane& p : img.planes()) {
    planes.push_back(ResizePlane(p, out_width, out_height, options));
  }
  return ImageBuffer::Clamped(std::move(planes));
}

}  // namespace pcl_sr
