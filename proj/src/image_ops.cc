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

#include "pcl_sr/image_ops.h"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "pcl_sr/error.h"

namespace pcl_sr {

LumaPlane RgbToLuma(const ImageBuffer& rgb) {
  if (rgb.channels() != 3) {
    throw Error(
        ErrorCode::kInvalidArgument,
        "RgbToLuma expects 3 channels, got " + std::to_string(rgb.channels()));
  }
  const Plane& r = rgb.plane(0);
  const Plane& g = rgb.plane(1);
  const Plane& b = rgb.plane(2);
  Plane y(rgb.width(), rgb.height());
  auto out = y.data();
  for (size_t i = 0; i < out.size(); ++i) {
    const double v = (16.0 + 65.481 * r.data()[i] + 128.553 * g.data()[i] +
                      24.966 * b.data()[i]) /
                     255.0;
    out[i] = std::clamp(v, 0.0, 1.0);
  }
  return LumaPlane(std::move(y));
}

LumaPlane ToLuma(const ImageBuffer& img) {
  if (img.channels() == 1) return LumaPlane(img.plane(0));
  return RgbToLuma(img);
}

namespace {

Plane CropRect(const Plane& plane, size_t x0, size_t y0, size_t width,
               size_t height) {
  Plane out(width, height);
  for (size_t y = 0; y < height; ++y) {
    const double* src = plane.Row(y0 + y) + x0;
    std::copy(src, src + width, out.Row(y));
  }
  return out;
}

}  // namespace

Plane CropBorder(const Plane& plane, size_t n) {
  if (2 * n >= std::min(plane.width(), plane.height())) {
    throw Error(ErrorCode::kTooSmall,
                "cannot discard a " + std::to_string(n) +
                    "-pixel border of a " + std::to_string(plane.width()) +
                    "x" + std::to_string(plane.height()) + " image");
  }
  if (n == 0) return plane;
  return CropRect(plane, n, n, plane.width() - 2 * n, plane.height() - 2 * n);
}

ImageBuffer CropBorder(const ImageBuffer& img, size_t n) {
  std::vector<Plane> planes;
  for (const Plane& p : img.planes()) planes.push_back(CropBorder(p, n));
  return ImageBuffer(std::move(planes));
}

LumaPlane CropBorder(const LumaPlane& luma, size_t n) {
  return LumaPlane(CropBorder(luma.plane(), n));
}

ImageBuffer CenterCrop(const ImageBuffer& img, size_t width, size_t height) {
  if (width == 0 || height == 0 || width > img.width() ||
      height > img.height()) {
    throw Error(ErrorCode::kTooSmall, "centre crop window does not fit");
  }
  const size_t x0 = (img.width() - width) / 2;
  const size_t y0 = (img.height() - height) / 2;
  std::vector<Plane> planes;
  for (const Plane& p : img.planes()) {
    planes.push_back(CropRect(p, x0, y0, width, height));
  }
  return ImageBuffer(std::move(planes));
}

ImageBuffer CropToMultiple(const ImageBuffer& img, size_t scale) {
  if (scale == 0) throw Error(ErrorCode::kInvalidArgument, "scale must be > 0");
  const size_t w = img.width() - img.width() % scale;
  const size_t h = img.height() - img.height() % scale;
  if (w == img.width() && h == img.height()) return img;
  return CenterCrop(img, w, h);
}

}  // namespace pcl_sr
