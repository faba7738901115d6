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

#include "pcl_sr/png_io.h"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "pcl_sr/error.h"

namespace pcl_sr {
namespace {

struct FileCloser {
  void operator()(FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

// libpng reports errors through longjmp; the message is stashed here so it
// can be rethrown as an Error once control is back in C++ land.
struct PngErrorState {
  std::string message;
};

void OnPngError(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  if (state != nullptr) state->message = msg;
  png_longjmp(png, 1);
}

void OnPngWarning(png_structp, png_const_charp) {}

struct DecodedPng {
  size_t width = 0;
  size_t height = 0;
  size_t channels = 0;
  int bit_depth = 8;
  std::vector<png_byte> pixels;
};

// Kept free of C++ objects with non-trivial destructors between setjmp and
// any longjmp, so the jump cannot skip destructors.
bool DecodeStream(FILE* fp, DecodedPng* out, PngErrorState* state) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, state,
                                           OnPngError, OnPngWarning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  png_bytepp rows = nullptr;
  if (setjmp(png_jmpbuf(png))) {
    png_free(png, rows);
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, fp);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  int bit_depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_palette_to_rgb(png);
    bit_depth = 8;
  }
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
    bit_depth = 8;
  }
  // tRNS would otherwise surface as an alpha channel after expansion.
  if (png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_tRNS_to_alpha(png);
  }
  png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const size_t width = png_get_image_width(png, info);
  const size_t height = png_get_image_height(png, info);
  const size_t channels = png_get_channels(png, info);
  const size_t rowbytes = png_get_rowbytes(png, info);
  out->width = width;
  out->height = height;
  out->channels = channels;
  out->bit_depth = png_get_bit_depth(png, info);
  out->pixels.resize(rowbytes * height);

  rows = static_cast<png_bytepp>(png_malloc(png, sizeof(png_bytep) * height));
  for (size_t y = 0; y < height; ++y) {
    rows[y] = out->pixels.data() + y * rowbytes;
  }
  png_read_image(png, rows);
  png_read_end(png, nullptr);
  png_free(png, rows);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool EncodeStream(FILE* fp, size_t width, size_t height, int color_type,
                  png_bytepp rows, PngErrorState* state) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, state,
                                            OnPngError, OnPngWarning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

ImageBuffer LoadPng(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kFileNotFound, "no such file: " + path.string());
  }
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) {
    throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  }
  png_byte sig[8] = {};
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw Error(ErrorCode::kUnsupportedFormat,
                "not a PNG file: " + path.string());
  }
  DecodedPng decoded;
  PngErrorState state;
  if (!DecodeStream(fp.get(), &decoded, &state)) {
    throw Error(ErrorCode::kDecodeFailure,
                "failed to decode " + path.string() +
                    (state.message.empty() ? "" : ": " + state.message));
  }
  if (decoded.channels != 1 && decoded.channels != 3) {
    throw Error(ErrorCode::kUnsupportedFormat,
                "unsupported channel layout in " + path.string());
  }

  const size_t w = decoded.width;
  const size_t h = decoded.height;
  const size_t nc = decoded.channels;
  std::vector<Plane> planes(nc, Plane(w, h));
  if (decoded.bit_depth == 16) {
    for (size_t i = 0; i < w * h; ++i) {
      for (size_t c = 0; c < nc; ++c) {
        const size_t k = 2 * (i * nc + c);
        // PNG stores 16-bit samples big-endian.
        const unsigned v = (unsigned{decoded.pixels[k]} << 8) |
                           unsigned{decoded.pixels[k + 1]};
        planes[c].data()[i] = v / 65535.0;
      }
    }
  } else {
    for (size_t i = 0; i < w * h; ++i) {
      for (size_t c = 0; c < nc; ++c) {
        planes[c].data()[i] = decoded.pixels[i * nc + c] / 255.0;
      }
    }
  }
  return ImageBuffer(std::move(planes));
}

void SavePng(const ImageBuffer& img, const std::filesystem::path& path) {
  const size_t w = img.width();
  const size_t h = img.height();
  const size_t nc = img.channels();
  std::vector<png_byte> pixels(w * h * nc);
  for (size_t i = 0; i < w * h; ++i) {
    for (size_t c = 0; c < nc; ++c) {
      pixels[i * nc + c] = QuantizeTo8Bit(img.plane(c).data()[i]);
    }
  }
  std::vector<png_bytep> rows(h);
  for (size_t y = 0; y < h; ++y) rows[y] = pixels.data() + y * w * nc;

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) {
    throw Error(ErrorCode::kIoFailure,
                "cannot open " + path.string() + " for writing");
  }
  PngErrorState state;
  const int color_type = nc == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
  if (!EncodeStream(fp.get(), w, h, color_type, rows.data(), &state) ||
      std::fflush(fp.get()) != 0) {
    throw Error(ErrorCode::kIoFailure,
                "failed to write " + path.string() +
                    (state.message.empty() ? "" : ": " + state.message));
  }
}

ImageBuffer QuantizeTo8Bit(const ImageBuffer& img) {
  std::vector<Plane> planes(img.planes().begin(), img.planes().end());
  for (Plane& p : planes) {
    for (double& v : p.data()) v = QuantizeTo8Bit(v) / 255.0;
  }
  return ImageBuffer(std::move(planes));
}

}  // namespace pcl_sr
