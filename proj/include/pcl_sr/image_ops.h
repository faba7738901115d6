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

#ifndef PCL_SR_IMAGE_OPS_H_
#define PCL_SR_IMAGE_OPS_H_

#include <cstddef>

#include "pcl_sr/image.h"

namespace pcl_sr {

enum class ChannelMode { kLuma, kRgb };

// How HR/SR pairs are compared: scale factor of the SR method, pixels
// discarded at every border, and which channels the metrics see.
struct EvalProtocol {
  int scale = 4;
  int border_discard = 4;
  ChannelMode channel_mode = ChannelMode::kLuma;
};

// Studio-swing BT.601 luma, Y = (16 + 65.481 R + 128.553 G + 24.966 B) / 255.
// Requires a 3-channel image.
LumaPlane RgbToLuma(const ImageBuffer& rgb);

// RgbToLuma for colour input; a single-channel image is taken as its own
// luma.
LumaPlane ToLuma(const ImageBuffer& img);

// Removes `n` pixels from every side. Requires 2n < min(width, height).
Plane CropBorder(const Plane& plane, size_t n);
ImageBuffer CropBorder(const ImageBuffer& img, size_t n);
LumaPlane CropBorder(const LumaPlane& luma, size_t n);

// Crops a window of the given size centred in the image (offsets round
// down).
ImageBuffer CenterCrop(const ImageBuffer& img, size_t width, size_t height);

// Centre-crops so both dimensions are multiples of `scale`.
ImageBuffer CropToMultiple(const ImageBuffer& img, size_t scale);

}  // namespace pcl_sr

#endif  // PCL_SR_IMAGE_OPS_H_
