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

// Distortion metrics (RMSE, PSNR, SSIM), the perceptual index, and the
// per-pair evaluation protocol tying them together with NIQE.

#ifndef PCL_SR_METRICS_H_
#define PCL_SR_METRICS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "pcl_sr/image.h"
#include "pcl_sr/image_ops.h"
#include "pcl_sr/niqe.h"

namespace pcl_sr {

// Root mean squared error on the 8-bit scale, over every sample of every
// plane.
double Rmse(std::span<const Plane> hr, std::span<const Plane> sr);
double Rmse(const LumaPlane& hr, const LumaPlane& sr);

// 20 log10(255 / rmse); +infinity when the images are identical.
double PsnrFromRmse(double rmse);
double Psnr(std::span<const Plane> hr, std::span<const Plane> sr);
double Psnr(const LumaPlane& hr, const LumaPlane& sr);

inline constexpr size_t kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

// Mean SSIM over the valid region of an 11x11 Gaussian window (sigma 1.5),
// K1 = 0.01, K2 = 0.03, L = 255. Multi-plane input averages the per-plane
// means. Both dimensions must be at least 11.
double Ssim(std::span<const Plane> hr, std::span<const Plane> sr);
double Ssim(const LumaPlane& hr, const LumaPlane& sr);

// ((10 - ma) + niqe) / 2. `ma` must lie in [0, 10].
double PerceptualIndex(double ma, double niqe);

// Image identifier -> Ma score lookup, fed from a `image_id,score` CSV.
class MaScoreProvider {
 public:
  MaScoreProvider() = default;
  explicit MaScoreProvider(std::map<std::string, double> scores);

  // Parses the sidecar; a first line whose score column is not numeric is
  // treated as a header.
  static MaScoreProvider FromCsv(const std::filesystem::path& path);

  // nullopt means "score unavailable" for that identifier.
  std::optional<double> Lookup(const std::string& image_id) const;
  size_t size() const { return scores_.size(); }

 private:
  std::map<std::string, double> scores_;
};

struct MetricReport {
  double rmse = 0.0;
  double psnr = 0.0;  // +infinity for identical images
  // Absent when the cropped image is smaller than the SSIM window.
  std::optional<double> ssim;
  // Absent without a NIQE model or when the image is smaller than a patch.
  std::optional<double> niqe;
  std::optional<double> ma;
  // Present iff both ma and niqe are.
  std::optional<double> pi;
  size_t eval_width = 0;
  size_t eval_height = 0;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

// Evaluates one HR/SR pair: both are reduced to the protocol channels
// (luma or RGB), `border_discard` pixels are dropped on every side, then all
// metrics are computed. NIQE always sees the cropped SR luma.
//
// When the SR image is smaller than HR and equals HR centre-cropped to a
// multiple of `protocol.scale`, HR is cropped the same way first; any other
// size difference is a kShapeMismatch.
MetricReport EvaluatePair(const ImageBuffer& hr, const ImageBuffer& sr,
                          const EvalProtocol& protocol,
                          const NiqeModel* niqe_model,
                          const MaScoreProvider* ma = nullptr,
                          const std::string& image_id = {});

}  // namespace pcl_sr

#endif  // PCL_SR_METRICS_H_
