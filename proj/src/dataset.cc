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

#include "pcl_sr/dataset.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <json.hpp>
#include <map>
#include <sstream>
#include <system_error>
#include <utility>

#include "parallel.h"
#include "pcl_sr/error.h"
#include "pcl_sr/png_io.h"
#include "pcl_sr/resize.h"

namespace pcl_sr {

namespace fs = std::filesystem;

std::vector<fs::path> ListPngFiles(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::kFileNotFound, "not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  fs::directory_iterator it(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoFailure,
                "cannot read directory " + dir.string() + ": " + ec.message());
  }
  for (const auto& entry : it) {
    if (!entry.is_regular_file(ec)) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

DatasetManifest ScanDataset(const fs::path& hr_dir, const fs::path& sr_dir) {
  std::map<std::string, fs::path> hr, sr;
  for (const auto& p : ListPngFiles(hr_dir)) hr.emplace(p.stem().string(), p);
  for (const auto& p : ListPngFiles(sr_dir)) sr.emplace(p.stem().string(), p);

  DatasetManifest m;
  m.name = fs::absolute(hr_dir).lexically_normal().filename().string();
  if (m.name.empty()) {
    m.name = fs::absolute(hr_dir)
                 .lexically_normal()
                 .parent_path()
                 .filename()
                 .string();
  }
  for (const auto& [stem, path] : hr) {
    auto it = sr.find(stem);
    if (it == sr.end()) {
      m.unmatched_hr.push_back(path);
    } else {
      m.pairs.push_back({stem, path, it->second});
    }
  }
  for (const auto& [stem, path] : sr) {
    if (!hr.contains(stem)) m.unmatched_sr.push_back(path);
  }
  if (m.pairs.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "no PNG file stems shared between " + hr_dir.string() +
                    " and " + sr_dir.string());
  }
  return m;
}

ImageBuffer MakeBicubicBaselineImage(const ImageBuffer& hr, int scale) {
  if (scale < 2) {
    throw Error(ErrorCode::kInvalidArgument, "baseline scale must be >= 2");
  }
  const size_t s = static_cast<size_t>(scale);
  if (hr.width() < s || hr.height() < s) {
    throw Error(ErrorCode::kTooSmall, "HR image smaller than the scale factor");
  }
  const ImageBuffer cropped = CropToMultiple(hr, s);
  const ImageBuffer lr = QuantizeTo8Bit(
      BicubicResize(cropped, cropped.width() / s, cropped.height() / s,
                    ResizeOptions{.antialias = true}));
  return QuantizeTo8Bit(BicubicResize(lr, cropped.width(), cropped.height(),
                                      ResizeOptions{.antialias = false}));
}

BaselineOutcome MakeBicubicBaseline(const fs::path& hr_dir, int scale,
                                    const fs::path& out_dir) {
  if (scale < 2) {
    throw Error(ErrorCode::kInvalidArgument, "baseline scale must be >= 2");
  }
  const auto files = ListPngFiles(hr_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoFailure,
                "cannot create " + out_dir.string() + ": " + ec.message());
  }
  BaselineOutcome out;
  for (const auto& path : files) {
    try {
      const ImageBuffer sr = MakeBicubicBaselineImage(LoadPng(path), scale);
      SavePng(sr, out_dir / (path.stem().string() + ".png"));
      ++out.written;
    } catch (const Error& e) {
      out.failures.push_back({path.stem().string(), e.what()});
    }
  }
  return out;
}

namespace {

struct MeanAccumulator {
  double sum = 0.0;
  size_t n = 0;
  void Add(double v) {
    sum += v;
    ++n;
  }
  void Add(const std::optional<double>& v) {
    if (v) Add(*v);
  }
  std::optional<double> Mean() const {
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  }
};

}  // namespace

MetricMeans ComputeMeans(const std::vector<PairOutcome>& outcomes) {
  MeanAccumulator rmse, psnr, ssim, niqe, ma, pi;
  MetricMeans m;
  for (const auto& o : outcomes) {
    if (!o.report) continue;
    const MetricReport& r = *o.report;
    ++m.count;
    rmse.Add(r.rmse);
    if (std::isinf(r.psnr)) {
      ++m.psnr_infinite;
    } else {
      psnr.Add(r.psnr);
    }
    ssim.Add(r.ssim);
    niqe.Add(r.niqe);
    ma.Add(r.ma);
    pi.Add(r.pi);
  }
  m.rmse = rmse.Mean().value_or(0.0);
  m.psnr = psnr.Mean();
  m.ssim = ssim.Mean();
  m.niqe = niqe.Mean();
  m.ma = ma.Mean();
  m.pi = pi.Mean();
  return m;
}

AggregateReport EvaluateDataset(const DatasetManifest& manifest,
                                const EvalProtocol& protocol,
                                const NiqeModel* niqe_model,
                                const MaScoreProvider* ma, size_t threads) {
  if (niqe_model != nullptr) niqe_model->Validate();
  AggregateReport agg;
  agg.dataset = manifest.name;
  agg.protocol = protocol;
  agg.per_image.resize(manifest.pairs.size());
  ParallelFor(manifest.pairs.size(), threads, [&](size_t i) {
    PairOutcome& o = agg.per_image[i];
    o.pair = manifest.pairs[i];
    try {
      o.report = EvaluatePair(LoadPng(o.pair.hr), LoadPng(o.pair.sr), protocol,
                              niqe_model, ma, o.pair.id);
    } catch (const Error& e) {
      o.error = e.what();
    }
  });
  for (const auto& o : agg.per_image) agg.failure_count += o.error ? 1 : 0;
  agg.mean = ComputeMeans(agg.per_image);
  return agg;
}

double RoundForReport(double v) {
  if (!std::isfinite(v)) return v;
  return std::round(v * 1e4) / 1e4;
}

namespace {

std::optional<double> RoundOpt(const std::optional<double>& v) {
  if (!v) return v;
  return RoundForReport(*v);
}

MetricReport RoundReport(MetricReport r) {
  r.rmse = RoundForReport(r.rmse);
  r.psnr = RoundForReport(r.psnr);
  r.ssim = RoundOpt(r.ssim);
  r.niqe = RoundOpt(r.niqe);
  r.ma = RoundOpt(r.ma);
  r.pi = RoundOpt(r.pi);
  return r;
}

// Rounded rows plus the rounded means of those rows.
std::pair<std::vector<PairOutcome>, MetricMeans> RoundedView(
    const AggregateReport& report) {
  std::vector<PairOutcome> rows = report.per_image;
  for (auto& o : rows) {
    if (o.report) o.report = RoundReport(*o.report);
  }
  MetricMeans m = ComputeMeans(rows);
  m.rmse = RoundForReport(m.rmse);
  m.psnr = RoundOpt(m.psnr);
  m.ssim = RoundOpt(m.ssim);
  m.niqe = RoundOpt(m.niqe);
  m.ma = RoundOpt(m.ma);
  m.pi = RoundOpt(m.pi);
  return {std::move(rows), m};
}

nlohmann::ordered_json OptJson(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

nlohmann::ordered_json PsnrJson(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

const char* ChannelName(ChannelMode mode) {
  return mode == ChannelMode::kLuma ? "y" : "rgb";
}

std::string FormatCell(const std::optional<double>& v) {
  if (!v) return "";
  if (std::isinf(*v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", kReportDecimals, *v);
  return buf;
}

}  // namespace

std::string ReportToJson(const AggregateReport& report) {
  const auto [rows, mean] = RoundedView(report);
  nlohmann::ordered_json j;
  j["dataset"] = report.dataset;
  j["protocol"] = {{"scale", report.protocol.scale},
                   {"border", report.protocol.border_discard},
                   {"channel", ChannelName(report.protocol.channel_mode)}};
  auto per_image = nlohmann::ordered_json::array();
  auto failures = nlohmann::ordered_json::array();
  for (const auto& o : rows) {
    if (!o.report) {
      failures.push_back({{"id", o.pair.id}, {"error", *o.error}});
      continue;
    }
    const MetricReport& r = *o.report;
    per_image.push_back({{"id", o.pair.id},
                         {"hr", o.pair.hr.filename().string()},
                         {"sr", o.pair.sr.filename().string()},
                         {"rmse", r.rmse},
                         {"psnr", PsnrJson(r.psnr)},
                         {"ssim", OptJson(r.ssim)},
                         {"niqe", OptJson(r.niqe)},
                         {"ma", OptJson(r.ma)},
                         {"pi", OptJson(r.pi)},
                         {"width", r.eval_width},
                         {"height", r.eval_height}});
  }
  j["per_image"] = std::move(per_image);
  j["mean"] = {
      {"count", mean.count},        {"rmse", mean.rmse},
      {"psnr", OptJson(mean.psnr)}, {"psnr_infinite", mean.psnr_infinite},
      {"ssim", OptJson(mean.ssim)}, {"niqe", OptJson(mean.niqe)},
      {"ma", OptJson(mean.ma)},     {"pi", OptJson(mean.pi)}};
  j["failures"] = std::move(failures);
  return j.dump(2) + "\n";
}

std::string ReportToCsv(const AggregateReport& report) {
  const auto [rows, mean] = RoundedView(report);
  std::ostringstream os;
  os << "id,rmse,psnr,ssim,niqe,ma,pi,error\n";
  for (const auto& o : rows) {
    os << o.pair.id << ',';
    if (o.report) {
      const MetricReport& r = *o.report;
      os << FormatCell(r.rmse) << ',' << FormatCell(r.psnr) << ','
         << FormatCell(r.ssim) << ',' << FormatCell(r.niqe) << ','
         << FormatCell(r.ma) << ',' << FormatCell(r.pi) << ",\n";
    } else {
      std::string err = *o.error;
      std::replace(err.begin(), err.end(), '"', '\'');
      os << ",,,,,,\"" << err << "\"\n";
    }
  }
  os << "mean," << FormatCell(mean.rmse) << ',' << FormatCell(mean.psnr) << ','
     << FormatCell(mean.ssim) << ',' << FormatCell(mean.niqe) << ','
     << FormatCell(mean.ma) << ',' << FormatCell(mean.pi) << ",\n";
  return os.str();
}

}  // namespace pcl_sr
