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

#include "pcl_sr/image.h"

#include <algorithm>
#include <string>
#include <utility>

#include "pcl_sr/error.h"

namespace pcl_sr {

Plane::Plane(size_t width, size_t height, double fill)
    : width_(width), height_(height), data_(width * height, fill) {}

Plane::Plane(size_t width, size_t height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (data_.size() != width * height) {
    throw Error(ErrorCode::kShapeMismatch,
                "plane data holds " + std::to_string(data_.size()) +
                    " values, expected " + std::to_string(width * height));
  }
}

namespace {

void ValidatePlanes(const std::vector<Plane>& planes) {
  if (planes.size() != 1 && planes.size() != 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "image must have 1 or 3 channels, got " +
                    std::to_string(planes.size()));
  }
  if (planes[0].empty()) {
    throw Error(ErrorCode::kInvalidArgument, "image has zero area");
  }
  for (const Plane& p : planes) {
    if (!p.SameShape(planes[0])) {
      throw Error(ErrorCode::kShapeMismatch, "channel planes differ in size");
    }
  }
}

void ValidateRange(const Plane& p) {
  for (double v : p.data()) {
    // Written so NaN fails as well.
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "pixel value " + std::to_string(v) + " outside [0, 1]");
    }
  }
}

}  // namespace

ImageBuffer::ImageBuffer(size_t width, size_t height, size_t channels,
                         double value) {
  planes_.assign(channels, Plane(width, height, value));
  ValidatePlanes(planes_);
  ValidateRange(planes_[0]);
}

ImageBuffer::ImageBuffer(std::vector<Plane> planes)
    : planes_(std::move(planes)) {
  ValidatePlanes(planes_);
  for (const Plane& p : planes_) ValidateRange(p);
}

ImageBuffer ImageBuffer::Clamped(std::vector<Plane> planes) {
  for (Plane& p : planes) {
    for (double& v : p.data()) {
      if (!(v >= 0.0)) {
        v = 0.0;
      } else if (v > 1.0) {
        v = 1.0;
      }
    }
  }
  return ImageBuffer(std::move(planes));
}

bool ImageBuffer::SameShape(const ImageBuffer& other) const {
  return channels() == other.channels() && width() == other.width() &&
         height() == other.height();
}

LumaPlane::LumaPlane(Plane plane) : plane_(std::move(plane)) {
  if (plane_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "luma plane has zero area");
  }
  ValidateRange(plane_);
}

void CheckSameShape(std::span<const Plane> a, std::span<const Plane> b,
                    const char* what) {
  bool same = a.size() == b.size() && !a.empty();
  for (size_t c = 0; same && c < a.size(); ++c) {
    same = a[c].SameShape(b[c]) && a[c].SameShape(a[0]);
  }
  if (!same) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string(what) + ": operands differ in shape");
  }
}

}  // namespace pcl_sr
