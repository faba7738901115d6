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

// Core pixel containers.
//
// Plane is an unconstrained row-major grid of doubles used for intermediate
// quantities (DCT coefficients, gradients, 8-bit-scaled statistics).
// ImageBuffer and LumaPlane wrap planes and enforce the unit-interval
// intensity invariant; they are immutable once constructed.

#ifndef PCL_SR_IMAGE_H_
#define PCL_SR_IMAGE_H_

#include <cstddef>
#include <span>
#include <vector>

namespace pcl_sr {

class Plane {
 public:
  Plane() = default;
  Plane(size_t width, size_t height, double fill = 0.0);
  // Takes ownership of `data`, which must hold width * height values.
  Plane(size_t width, size_t height, std::vector<double> data);

  size_t width() const { return width_; }
  size_t height() const { return height_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(size_t x, size_t y) { return data_[y * width_ + x]; }
  double at(size_t x, size_t y) const { return data_[y * width_ + x]; }

  double* Row(size_t y) { return data_.data() + y * width_; }
  const double* Row(size_t y) const { return data_.data() + y * width_; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool SameShape(const Plane& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  size_t width_ = 0;
  size_t height_ = 0;
  std::vector<double> data_;
};

// Planar 1- or 3-channel image with intensities in [0, 1].
class ImageBuffer {
 public:
  ImageBuffer() = default;
  // Constant image.
  ImageBuffer(size_t width, size_t height, size_t channels, double value);
  // Validates channel count, shapes and the [0, 1] range.
  explicit ImageBuffer(std::vector<Plane> planes);

  // Clamps every value into [0, 1] instead of rejecting out-of-range input.
  static ImageBuffer Clamped(std::vector<Plane> planes);

  size_t width() const { return planes_.empty() ? 0 : planes_[0].width(); }
  size_t height() const { return planes_.empty() ? 0 : planes_[0].height(); }
  size_t channels() const { return planes_.size(); }

  const Plane& plane(size_t c) const { return planes_[c]; }
  std::span<const Plane> planes() const { return planes_; }

  double at(size_t x, size_t y, size_t c) const { return planes_[c].at(x, y); }

  bool SameShape(const ImageBuffer& other) const;

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::vector<Plane> planes_;
};

// Single luma plane with values in [0, 1].
class LumaPlane {
 public:
  LumaPlane() = default;
  explicit LumaPlane(Plane plane);

  size_t width() const { return plane_.width(); }
  size_t height() const { return plane_.height(); }
  const Plane& plane() const { return plane_; }
  std::span<const Plane> planes() const { return {&plane_, 1}; }
  double at(size_t x, size_t y) const { return plane_.at(x, y); }

  ImageBuffer ToImage() const { return ImageBuffer({plane_}); }

  friend bool operator==(const LumaPlane&, const LumaPlane&) = default;

 private:
  Plane plane_;
};

// Throws kShapeMismatch unless both plane sets have equal channel counts and
// dimensions.
void CheckSameShape(std::span<const Plane> a, std::span<const Plane> b,
                    const char* what);

}  // namespace pcl_sr

#endif  // PCL_SR_IMAGE_H_
