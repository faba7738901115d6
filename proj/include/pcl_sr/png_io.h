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

#ifndef PCL_SR_PNG_IO_H_
#define PCL_SR_PNG_IO_H_

#include <cstdint>
#include <filesystem>

#include "pcl_sr/image.h"

namespace pcl_sr {

// Reads an 8- or 16-bit grayscale/RGB PNG. Alpha is dropped, palette and
// sub-byte grayscale are expanded to 8 bits. Samples are divided by the
// bit-depth maximum.
//
// Errors: kFileNotFound, kUnsupportedFormat (no PNG signature),
// kDecodeFailure (corrupt stream).
ImageBuffer LoadPng(const std::filesystem::path& path);

// Writes an 8-bit PNG; each sample becomes round-half-up(v * 255).
void SavePng(const ImageBuffer& img, const std::filesystem::path& path);

// The quantizer used by SavePng.
inline uint8_t QuantizeTo8Bit(double v) {
  const double scaled = v * 255.0 + 0.5;
  if (!(scaled > 0.0)) return 0;
  if (scaled >= 255.0) return 255;
  return static_cast<uint8_t>(scaled);
}

// Round-trips every sample through 8-bit quantization.
ImageBuffer QuantizeTo8Bit(const ImageBuffer& img);

}  // namespace pcl_sr

#endif  // PCL_SR_PNG_IO_H_
