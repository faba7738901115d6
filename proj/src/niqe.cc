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

#include "pcl_sr/niqe.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "pcl_sr/error.h"
#include "pcl_sr/image_ops.h"
#include "pcl_sr/resize.h"

namespace pcl_sr {
namespace {

constexpr int kMscnRadius = 3;  // 7x7 window
constexpr double kMscnSigma = 7.0 / 6.0;
constexpr double kAggdShapeMin = 0.2;
constexpr double kAggdShapeStep = 0.001;
constexpr size_t kAggdShapeCount = 9801;  // 0.2:0.001:10

struct AggdTable {
  std::vector<double> shape;
  std::vector<double> ratio;  // Gamma(2/a)^2 / (Gamma(1/a) Gamma(3/a))

  AggdTable() : shape(kAggdShapeCount), ratio(kAggdShapeCount) {
    for (size_t k = 0; k < kAggdShapeCount; ++k) {
      const double a = kAggdShapeMin + static_cast<double>(k) * kAggdShapeStep;
      shape[k] = a;
      const double g2 = std::tgamma(2.0 / a);
      ratio[k] = g2 * g2 / (std::tgamma(1.0 / a) * std::tgamma(3.0 / a));
    }
  }
};

const AggdTable& Table() {
  static const AggdTable table;
  return table;
}

std::array<double, 2 * kMscnRadius + 1> GaussianTaps() {
  std::array<double, 2 * kMscnRadius + 1> taps{};
  double sum = 0.0;
  for (int i = -kMscnRadius; i <= kMscnRadius; ++i) {
    const double v = std::exp(-(i * i) / (2.0 * kMscnSigma * kMscnSigma));
    taps[i + kMscnRadius] = v;
    sum += v;
  }
  for (double& v : taps) v /= sum;
  return taps;
}

// Same-size separable Gaussian blur with replicated borders.
Plane GaussianBlur(const Plane& in) {
  const auto taps = GaussianTaps();
  const long long w = static_cast<long long>(in.width());
  const long long h = static_cast<long long>(in.height());
  Plane tmp(in.width(), in.height());
  for (long long y = 0; y < h; ++y) {
    const double* src = in.Row(y);
    double* dst = tmp.Row(y);
    for (long long x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -kMscnRadius; k <= kMscnRadius; ++k) {
        acc += taps[k + kMscnRadius] * src[std::clamp(x + k, 0LL, w - 1)];
      }
      dst[x] = acc;
    }
  }
  Plane out(in.width(), in.height());
  for (long long y = 0; y < h; ++y) {
    double* dst = out.Row(y);
    for (long long x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -kMscnRadius; k <= kMscnRadius; ++k) {
        acc += taps[k + kMscnRadius] * tmp.at(x, std::clamp(y + k, 0LL, h - 1));
      }
      dst[x] = acc;
    }
  }
  return out;
}

Plane ExtractBlock(const Plane& p, size_t x0, size_t y0, size_t size) {
  Plane out(size, size);
  for (size_t y = 0; y < size; ++y) {
    const double* src = p.Row(y0 + y) + x0;
    std::copy(src, src + size, out.Row(y));
  }
  return out;
}

}  // namespace

bool NiqeModel::Degenerate() const {
  return std::all_of(sigma.begin(), sigma.end(),
                     [](double v) { return v == 0.0; });
}

void NiqeModel::Validate() const {
  if (patch_size < 2 || patch_size % 2 != 0) {
    throw Error(ErrorCode::kParseFailure,
                "NIQE patch size must be a positive even number");
  }
  if (mu.size() != kNiqeFeatureDim ||
      sigma.size() != kNiqeFeatureDim * kNiqeFeatureDim) {
    throw Error(ErrorCode::kParseFailure, "NIQE model has wrong dimensions");
  }
  for (double v : mu) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kParseFailure, "NIQE model mean not finite");
    }
  }
  for (size_t i = 0; i < kNiqeFeatureDim; ++i) {
    for (size_t j = 0; j < kNiqeFeatureDim; ++j) {
      const double a = sigma[i * kNiqeFeatureDim + j];
      const double b = sigma[j * kNiqeFeatureDim + i];
      if (!std::isfinite(a)) {
        throw Error(ErrorCode::kParseFailure,
                    "NIQE model covariance not finite");
      }
      if (std::abs(a - b) > 1e-9 * std::max({1.0, std::abs(a), std::abs(b)})) {
        throw Error(ErrorCode::kParseFailure,
                    "NIQE model covariance not symmetric");
      }
    }
  }
}

AggdFit FitAggd(std::span<const double> samples) {
  double left_sq = 0.0, right_sq = 0.0, abs_sum = 0.0, sq_sum = 0.0;
  size_t left_n = 0, right_n = 0;
  for (double v : samples) {
    if (v < 0.0) {
      left_sq += v * v;
      ++left_n;
    } else if (v > 0.0) {
      right_sq += v * v;
      ++right_n;
    }
    abs_sum += std::abs(v);
    sq_sum += v * v;
  }
  const double nan = std::nan("");
  if (left_n == 0 || right_n == 0) return {nan, nan, nan};
  const double n = static_cast<double>(samples.size());
  const double left_std = std::sqrt(left_sq / static_cast<double>(left_n));
  const double right_std = std::sqrt(right_sq / static_cast<double>(right_n));
  const double gamma_hat = left_std / right_std;
  const double mean_abs = abs_sum / n;
  const double r_hat = mean_abs * mean_abs / (sq_sum / n);
  const double g2 = gamma_hat * gamma_hat;
  const double r_norm = r_hat * (g2 * gamma_hat + 1.0) * (gamma_hat + 1.0) /
                        ((g2 + 1.0) * (g2 + 1.0));

  const AggdTable& t = Table();
  size_t best = 0;
  double best_err = INFINITY;
  for (size_t k = 0; k < kAggdShapeCount; ++k) {
    const double d = t.ratio[k] - r_norm;
    const double err = d * d;
    if (err < best_err) {  // first minimum wins
      best_err = err;
      best = k;
    }
  }
  const double alpha = t.shape[best];
  const double scale =
      std::sqrt(std::tgamma(1.0 / alpha) / std::tgamma(3.0 / alpha));
  return {alpha, left_std * scale, right_std * scale};
}

Plane ComputeMscn(const Plane& plane, Plane* local_sigma) {
  const Plane mu = GaussianBlur(plane);
  Plane sq(plane.width(), plane.height());
  for (size_t i = 0; i < sq.size(); ++i) {
    sq.data()[i] = plane.data()[i] * plane.data()[i];
  }
  const Plane mu_sq_blur = GaussianBlur(sq);
  Plane sigma(plane.width(), plane.height());
  Plane mscn(plane.width(), plane.height());
  for (size_t i = 0; i < mscn.size(); ++i) {
    const double m = mu.data()[i];
    const double s = std::sqrt(std::abs(mu_sq_blur.data()[i] - m * m));
    sigma.data()[i] = s;
    double d = plane.data()[i] - m;
    // Inside flat regions d is rounding noise whose sign would decide the
    // AGGD side of the sample.
    if (std::abs(d) < kMscnFlatTolerance) d = 0.0;
    mscn.data()[i] = d / (s + 1.0);
  }
  if (local_sigma != nullptr) *local_sigma = std::move(sigma);
  return mscn;
}

std::array<double, kNiqeFeaturesPerScale> MscnPatchFeatures(
    const Plane& patch) {
  std::array<double, kNiqeFeaturesPerScale> feat{};
  const AggdFit base = FitAggd(patch.data());
  feat[0] = base.alpha;
  feat[1] = (base.beta_left + base.beta_right) / 2.0;

  // Neighbour offsets (dy, dx): the product pairs each sample with the one
  // at (y - dy, x - dx), wrapping inside the patch.
  constexpr int kShifts[4][2] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
  const long long w = static_cast<long long>(patch.width());
  const long long h = static_cast<long long>(patch.height());
  std::vector<double> products(patch.size());
  for (int s = 0; s < 4; ++s) {
    const long long dy = kShifts[s][0];
    const long long dx = kShifts[s][1];
    for (long long y = 0; y < h; ++y) {
      const long long sy = ((y - dy) % h + h) % h;
      for (long long x = 0; x < w; ++x) {
        const long long sx = ((x - dx) % w + w) % w;
        products[y * w + x] = patch.at(x, y) * patch.at(sx, sy);
      }
    }
    const AggdFit fit = FitAggd(products);
    const double mean =
        (fit.beta_right - fit.beta_left) *
        (std::tgamma(2.0 / fit.alpha) / std::tgamma(1.0 / fit.alpha));
    feat[2 + 4 * s] = fit.alpha;
    feat[3 + 4 * s] = mean;
    feat[4 + 4 * s] = fit.beta_left * fit.beta_left;
    feat[5 + 4 * s] = fit.beta_right * fit.beta_right;
  }
  return feat;
}

NiqePatchFeatures ExtractNiqeFeatures(const LumaPlane& luma,
                                      size_t patch_size) {
  if (patch_size < 2 || patch_size % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "NIQE patch size must be a positive even number");
  }
  const size_t cols = luma.width() / patch_size;
  const size_t rows = luma.height() / patch_size;
  if (cols == 0 || rows == 0) {
    throw Error(ErrorCode::kTooSmall,
                "image of " + std::to_string(luma.width()) + "x" +
                    std::to_string(luma.height()) +
                    " is smaller than one NIQE patch of " +
                    std::to_string(patch_size) + " pixels");
  }
  Plane img(cols * patch_size, rows * patch_size);
  for (size_t y = 0; y < img.height(); ++y) {
    for (size_t x = 0; x < img.width(); ++x) {
      img.at(x, y) = 255.0 * luma.at(x, y);
    }
  }

  NiqePatchFeatures out;
  out.features.resize(rows * cols);
  out.sharpness.resize(rows * cols);
  for (size_t scale = 1; scale <= 2; ++scale) {
    const size_t ps = patch_size / scale;
    Plane sigma;
    const Plane mscn = ComputeMscn(img, &sigma);
    for (size_t by = 0; by < rows; ++by) {
      for (size_t bx = 0; bx < cols; ++bx) {
        const size_t idx = by * cols + bx;
        const auto f =
            MscnPatchFeatures(ExtractBlock(mscn, bx * ps, by * ps, ps));
        std::copy(
            f.begin(), f.end(),
            out.features[idx].begin() + (scale - 1) * kNiqeFeaturesPerScale);
        if (scale == 1) {
          const Plane block = ExtractBlock(sigma, bx * ps, by * ps, ps);
          double sum = 0.0;
          for (double v : block.data()) sum += v;
          out.sharpness[idx] = sum / static_cast<double>(block.size());
        }
      }
    }
    if (scale == 1) {
      img = ResizePlane(img, img.width() / 2, img.height() / 2,
                        ResizeOptions{.antialias = true});
    }
  }
  return out;
}

FeatureStats ComputeFeatureStats(std::span<const NiqeFeatureVector> rows) {
  std::vector<const NiqeFeatureVector*> usable;
  for (const auto& r : rows) {
    if (std::all_of(r.begin(), r.end(),
                    [](double v) { return std::isfinite(v); })) {
      usable.push_back(&r);
    }
  }
  if (usable.empty()) {
    throw Error(ErrorCode::kNumericFailure,
                "no NIQE patch produced finite features");
  }
  constexpr size_t d = kNiqeFeatureDim;
  FeatureStats st;
  st.rows = usable.size();
  st.mu.assign(d, 0.0);
  st.sigma.assign(d * d, 0.0);
  // Accumulate around the first row so that identical rows give an exactly
  // zero covariance.
  const NiqeFeatureVector& origin = *usable.front();
  std::vector<double> shift(d, 0.0);
  for (const auto* r : usable) {
    for (size_t i = 0; i < d; ++i) shift[i] += (*r)[i] - origin[i];
  }
  const double n = static_cast<double>(usable.size());
  for (double& v : shift) v /= n;
  for (size_t i = 0; i < d; ++i) st.mu[i] = origin[i] + shift[i];
  if (usable.size() > 1) {
    for (const auto* r : usable) {
      for (size_t i = 0; i < d; ++i) {
        const double di = ((*r)[i] - origin[i]) - shift[i];
        for (size_t j = i; j < d; ++j) {
          st.sigma[i * d + j] += di * (((*r)[j] - origin[j]) - shift[j]);
        }
      }
    }
    for (size_t i = 0; i < d; ++i) {
      for (size_t j = i; j < d; ++j) {
        st.sigma[i * d + j] /= (n - 1.0);
        st.sigma[j * d + i] = st.sigma[i * d + j];
      }
    }
  }
  return st;
}

double NiqeDistance(std::span<const double> test_mu,
                    std::span<const double> test_sigma,
                    const NiqeModel& model) {
  constexpr size_t d = kNiqeFeatureDim;
  if (test_mu.size() != d || test_sigma.size() != d * d ||
      model.mu.size() != d || model.sigma.size() != d * d) {
    throw Error(ErrorCode::kShapeMismatch, "NIQE feature dimension mismatch");
  }
  // Cholesky factor of the pooled covariance, lower triangle in place.
  std::vector<double> l(d * d);
  for (size_t i = 0; i < d * d; ++i) {
    l[i] = 0.5 * (model.sigma[i] + test_sigma[i]);
  }
  for (size_t i = 0; i < d; ++i) l[i * d + i] += kNiqeRidge;
  for (size_t j = 0; j < d; ++j) {
    double diag = l[j * d + j];
    for (size_t k = 0; k < j; ++k) diag -= l[j * d + k] * l[j * d + k];
    if (!(diag > 0.0) || !std::isfinite(diag)) {
      throw Error(ErrorCode::kNumericFailure,
                  "pooled NIQE covariance is singular after ridge "
                  "regularisation");
    }
    const double ljj = std::sqrt(diag);
    l[j * d + j] = ljj;
    for (size_t i = j + 1; i < d; ++i) {
      double v = l[i * d + j];
      for (size_t k = 0; k < j; ++k) v -= l[i * d + k] * l[j * d + k];
      l[i * d + j] = v / ljj;
    }
  }
  // q = |L^-1 (mu_m - mu_t)|^2
  std::vector<double> z(d);
  for (size_t i = 0; i < d; ++i) {
    double v = model.mu[i] - test_mu[i];
    for (size_t k = 0; k < i; ++k) v -= l[i * d + k] * z[k];
    z[i] = v / l[i * d + i];
  }
  double q = 0.0;
  for (double v : z) q += v * v;
  if (!std::isfinite(q)) {
    throw Error(ErrorCode::kNumericFailure, "NIQE distance is not finite");
  }
  return std::sqrt(q);
}

double Niqe(const LumaPlane& luma, const NiqeModel& model) {
  model.Validate();
  const NiqePatchFeatures pf = ExtractNiqeFeatures(luma, model.patch_size);
  const FeatureStats st = ComputeFeatureStats(pf.features);
  return NiqeDistance(st.mu, st.sigma, model);
}

NiqeModel FitNiqeModel(std::span<const ImageBuffer> corpus, size_t patch_size) {
  if (corpus.size() < kNiqeMinCorpusSize) {
    throw Error(ErrorCode::kTooSmall, "NIQE corpus needs at least " +
                                          std::to_string(kNiqeMinCorpusSize) +
                                          " images, got " +
                                          std::to_string(corpus.size()));
  }
  std::vector<NiqeFeatureVector> pooled;
  for (const ImageBuffer& img : corpus) {
    if (img.width() < 2 * patch_size || img.height() < 2 * patch_size) {
      throw Error(ErrorCode::kTooSmall,
                  "NIQE corpus images must be at least twice the patch size "
                  "on each side");
    }
    const NiqePatchFeatures pf = ExtractNiqeFeatures(ToLuma(img), patch_size);
    const double peak =
        *std::max_element(pf.sharpness.begin(), pf.sharpness.end());
    for (size_t i = 0; i < pf.features.size(); ++i) {
      if (pf.sharpness[i] > kNiqeSharpnessThreshold * peak) {
        pooled.push_back(pf.features[i]);
      }
    }
  }
  std::erase_if(pooled, [](const NiqeFeatureVector& r) {
    return !std::all_of(r.begin(), r.end(),
                        [](double v) { return std::isfinite(v); });
  });
  std::sort(pooled.begin(), pooled.end());
  const FeatureStats st = ComputeFeatureStats(pooled);
  NiqeModel model;
  model.patch_size = patch_size;
  model.mu = st.mu;
  model.sigma = st.sigma;
  return model;
}

NiqeModel LoadNiqeModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kFileNotFound,
                "cannot open NIQE model " + path.string());
  }
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != kNiqeModelHeader) {
    throw Error(ErrorCode::kParseFailure,
                path.string() + ": expected header '" +
                    std::string(kNiqeModelHeader) + "'");
  }
  NiqeModel model;
  size_t dim = 0;
  if (!(in >> model.patch_size >> dim) || dim != kNiqeFeatureDim) {
    throw Error(ErrorCode::kParseFailure,
                path.string() + ": bad patch_size / feature_dim");
  }
  model.mu.resize(dim);
  model.sigma.resize(dim * dim);
  for (double& v : model.mu) {
    if (!(in >> v)) {
      throw Error(ErrorCode::kParseFailure, path.string() + ": truncated mean");
    }
  }
  for (double& v : model.sigma) {
    if (!(in >> v)) {
      throw Error(ErrorCode::kParseFailure,
                  path.string() + ": truncated covariance");
    }
  }
  std::string extra;
  if (in >> extra) {
    throw Error(ErrorCode::kParseFailure,
                path.string() + ": trailing data after covariance");
  }
  model.Validate();
  return model;
}

void SaveNiqeModel(const NiqeModel& model, const std::filesystem::path& path) {
  model.Validate();
  std::ostringstream os;
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
  };
  os << kNiqeModelHeader << '\n'
     << model.patch_size << '\n'
     << kNiqeFeatureDim << '\n';
  for (size_t i = 0; i < kNiqeFeatureDim; ++i) {
    if (i) os << ' ';
    put(model.mu[i]);
  }
  os << '\n';
  for (size_t r = 0; r < kNiqeFeatureDim; ++r) {
    for (size_t c = 0; c < kNiqeFeatureDim; ++c) {
      if (c) os << ' ';
      put(model.sigma[r * kNiqeFeatureDim + c]);
    }
    os << '\n';
  }
  std::ofstream out(path, std::ios::binary);
  out << os.str();
  if (!out.flush()) {
    throw Error(ErrorCode::kIoFailure,
                "failed to write NIQE model " + path.string());
  }
}

}  // namespace pcl_sr
