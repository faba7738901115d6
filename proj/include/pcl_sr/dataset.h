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

// Dataset-level evaluation: HR/SR pairing, bicubic baselines, aggregation and
// report emission.

#ifndef PCL_SR_DATASET_H_
#define PCL_SR_DATASET_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pcl_sr/image.h"
#include "pcl_sr/image_ops.h"
#include "pcl_sr/metrics.h"
#include "pcl_sr/niqe.h"

namespace pcl_sr {

struct ImagePair {
  std::string id;  // shared file stem
  std::filesystem::path hr;
  std::filesystem::path sr;
};

struct DatasetManifest {
  std::string name;
  std::vector<ImagePair> pairs;  // sorted by stem
  std::vector<std::filesystem::path> unmatched_hr;
  std::vector<std::filesystem::path> unmatched_sr;
};

// Sorted .png files (case-insensitive extension) directly inside `dir`.
std::vector<std::filesystem::path> ListPngFiles(
    const std::filesystem::path& dir);

// Pairs PNG files of the two directories by stem. Fails if a directory
// cannot be read or no stem is shared.
DatasetManifest ScanDataset(const std::filesystem::path& hr_dir,
                            const std::filesystem::path& sr_dir);

struct FileFailure {
  std::string id;
  std::string error;
};

struct BaselineOutcome {
  size_t written = 0;
  std::vector<FileFailure> failures;
};

// The "Bicubic" reference method: centre-crop to a multiple of `scale`,
// antialiased bicubic downscale by 1/scale, 8-bit quantisation of the LR
// image, bicubic upscale by `scale`, 8-bit PNG output named after the HR
// stem. Per-file failures are collected and the run continues.
ImageBuffer MakeBicubicBaselineImage(const ImageBuffer& hr, int scale);
BaselineOutcome MakeBicubicBaseline(const std::filesystem::path& hr_dir,
                                    int scale,
                                    const std::filesystem::path& out_dir);

struct PairOutcome {
  ImagePair pair;
  std::optional<MetricReport> report;
  std::optional<std::string> error;
};

// Arithmetic means over successful pairs. Optional metrics average over the
// pairs that have them; PSNR skips infinite entries and counts them.
struct MetricMeans {
  size_t count = 0;
  double rmse = 0.0;
  std::optional<double> psnr;
  size_t psnr_infinite = 0;
  std::optional<double> ssim;
  std::optional<double> niqe;
  std::optional<double> ma;
  std::optional<double> pi;
};

struct AggregateReport {
  std::string dataset;
  EvalProtocol protocol;
  std::vector<PairOutcome> per_image;  // manifest order
  MetricMeans mean;
  size_t failure_count = 0;
};

MetricMeans ComputeMeans(const std::vector<PairOutcome>& outcomes);

AggregateReport EvaluateDataset(const DatasetManifest& manifest,
                                const EvalProtocol& protocol,
                                const NiqeModel* niqe_model,
                                const MaScoreProvider* ma = nullptr,
                                size_t threads = 1);

// Reports print every metric rounded to 4 decimals. Emitted means are the
// rounded means of the rounded per-image values, so they can be recomputed
// exactly from the emitted rows.
inline constexpr int kReportDecimals = 4;
double RoundForReport(double v);

// JSON schema:
//   {"dataset": str,
//    "protocol": {"scale": int, "border": int, "channel": "y"|"rgb"},
//    "per_image": [{"id", "hr", "sr", "rmse", "psnr", "ssim", "niqe", "ma",
//                   "pi", "width", "height"}],
//    "mean": {"count", "rmse", "psnr", "psnr_infinite", "ssim", "niqe", "ma",
//             "pi"},
//    "failures": [{"id", "error"}]}
// Infinite PSNR is the string "inf"; unavailable metrics are null.
std::string ReportToJson(const AggregateReport& report);
std::string ReportToCsv(const AggregateReport& report);

}  // namespace pcl_sr

#endif  // PCL_SR_DATASET_H_
