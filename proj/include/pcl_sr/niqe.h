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

// Natural Image Quality Evaluator.
//
// Pipeline on an 8-bit-scaled luma plane, cropped to whole patches:
//   1. MSCN coefficients (I - mu) / (sigma + 1), local moments from a 7x7
//      Gaussian window (sigma 7/6) with replicated borders. Numerators below
//      kMscnFlatTolerance are set to zero.
//   2. Per patch, 18 features: AGGD shape and mean scale of the MSCN map,
//      then AGGD shape, mean, left and right variance of the products with
//      the horizontal, vertical and both diagonal neighbours (wrapping inside
//      the patch).
//   3. Repeat on the 0.5x bicubic image with half-size patches -> 36 features.
//   4. Score = sqrt((mu_m - mu_t)^T ((S_m + S_t) / 2)^-1 (mu_m - mu_t)) where
//      (mu_t, S_t) are the mean/covariance of the test image's patch features.
//
// Model fitting keeps, per image, only patches whose mean local sigma exceeds
// 0.75 of the sharpest patch of that image.

#ifndef PCL_SR_NIQE_H_
#define PCL_SR_NIQE_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pcl_sr/image.h"

namespace pcl_sr {

inline constexpr size_t kNiqeFeaturesPerScale = 18;
inline constexpr size_t kNiqeFeatureDim = 2 * kNiqeFeaturesPerScale;
inline constexpr size_t kNiqeDefaultPatchSize = 96;
inline constexpr double kNiqeSharpnessThreshold = 0.75;
inline constexpr double kNiqeRidge = 1e-10;
// |I - mu| below this (8-bit scale) counts as exactly zero in the MSCN map.
inline constexpr double kMscnFlatTolerance = 1e-8;
inline constexpr char kNiqeModelHeader[] = "NIQE-MODEL v1";

using NiqeFeatureVector = std::array<double, kNiqeFeatureDim>;

struct NiqeModel {
  size_t patch_size = kNiqeDefaultPatchSize;
  std::vector<double> mu;     // kNiqeFeatureDim
  std::vector<double> sigma;  // kNiqeFeatureDim^2, row-major
  std::string version = "v1";

  // True when the covariance is identically zero (e.g. a corpus whose
  // selected patches are all identical).
  bool Degenerate() const;
  // Throws kParseFailure on wrong sizes, asymmetric or non-finite entries.
  void Validate() const;
};

// Asymmetric generalised Gaussian fit by moment matching over the shape grid
// 0.2:0.001:10. Non-finite members signal a sample the fit cannot describe
// (e.g. no negative values).
struct AggdFit {
  double alpha = 0.0;
  double beta_left = 0.0;
  double beta_right = 0.0;
};
AggdFit FitAggd(std::span<const double> samples);

// MSCN map of an 8-bit-scaled plane. When `local_sigma` is non-null it
// receives the local standard deviation map.
Plane ComputeMscn(const Plane& plane, Plane* local_sigma = nullptr);

// The 18 single-scale features of one MSCN patch (row-major samples).
std::array<double, kNiqeFeaturesPerScale> MscnPatchFeatures(
    const Plane& mscn_patch);

struct NiqePatchFeatures {
  std::vector<NiqeFeatureVector> features;  // row-major patch order
  std::vector<double> sharpness;            // mean local sigma, first scale
};

// Two-scale patch features of a luma plane in [0, 1]. The plane is cropped
// (top-left anchored) to whole patches. Throws kTooSmall if no patch fits.
NiqePatchFeatures ExtractNiqeFeatures(
    const LumaPlane& luma, size_t patch_size = kNiqeDefaultPatchSize);

// Sample mean / covariance of feature rows, skipping rows with non-finite
// entries. Throws kNumericFailure when no usable row remains.
struct FeatureStats {
  std::vector<double> mu;
  std::vector<double> sigma;
  size_t rows = 0;
};
FeatureStats ComputeFeatureStats(std::span<const NiqeFeatureVector> rows);

// Mahalanobis-style distance between a test distribution and the model,
// using the ridge-regularised pooled covariance. A pooled covariance that is
// still not positive definite is a kNumericFailure.
double NiqeDistance(std::span<const double> test_mu,
                    std::span<const double> test_sigma, const NiqeModel& model);

double Niqe(const LumaPlane& luma, const NiqeModel& model);

// Fits a pristine model. Requires at least 10 images with both sides at least
// twice the patch size. Feature rows are pooled in sorted order so the result
// does not depend on corpus order.
NiqeModel FitNiqeModel(std::span<const ImageBuffer> corpus,
                       size_t patch_size = kNiqeDefaultPatchSize);

inline constexpr size_t kNiqeMinCorpusSize = 10;

NiqeModel LoadNiqeModel(const std::filesystem::path& path);
void SaveNiqeModel(const NiqeModel& model, const std::filesystem::path& path);

}  // namespace pcl_sr

#endif  // PCL_SR_NIQE_H_
