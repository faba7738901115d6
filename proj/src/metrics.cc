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

#include "pcl_sr/metrics.h"

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include "pcl_sr/error.h"

namespace pcl_sr {

double Rmse(std::span<const Plane> hr, std::span<const Plane> sr) {
  CheckSameShape(hr, sr, "RMSE");
  double sum = 0.0;
  size_t n = 0;
  for (size_t c = 0; c < hr.size(); ++c) {
    auto a = hr[c].data();
    auto b = sr[c].data();
    for (size_t i = 0; i < a.size(); ++i) {
      const double d = 255.0 * a[i] - 255.0 * b[i];
      sum += d * d;
    }
    n += a.size();
  }
  return std::sqrt(sum / static_cast<double>(n));
}

double Rmse(const LumaPlane& hr, const LumaPlane& sr) {
  return Rmse(hr.planes(), sr.planes());
}

double PsnrFromRmse(double rmse) {
  if (rmse == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(255.0 / rmse);
}

double Psnr(std::span<const Plane> hr, std::span<const Plane> sr) {
  return PsnrFromRmse(Rmse(hr, sr));
}

double Psnr(const LumaPlane& hr, const LumaPlane& sr) {
  return Psnr(hr.planes(), sr.planes());
}

namespace {

constexpr double kSsimC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kSsimC2 = (0.03 * 255.0) * (0.03 * 255.0);

std::array<double, kSsimWindow> SsimTaps() {
  std::array<double, kSsimWindow> taps{};
  const int r = static_cast<int>(kSsimWindow / 2);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    taps[i + r] = std::exp(-(i * i) / (2.0 * kSsimSigma * kSsimSigma));
    sum += taps[i + r];
  }
  for (double& v : taps) v /= sum;
  return taps;
}

// Separable 'valid' Gaussian filter.
Plane FilterValid(const Plane& in,
                  const std::array<double, kSsimWindow>& taps) {
  const size_t ow = in.width() - kSsimWindow + 1;
  const size_t oh = in.height() - kSsimWindow + 1;
  Plane tmp(ow, in.height());
  for (size_t y = 0; y < in.height(); ++y) {
    const double* src = in.Row(y);
    double* dst = tmp.Row(y);
    for (size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (size_t k = 0; k < kSsimWindow; ++k) acc += taps[k] * src[x + k];
      dst[x] = acc;
    }
  }
  Plane out(ow, oh);
  for (size_t y = 0; y < oh; ++y) {
    double* dst = out.Row(y);
    for (size_t k = 0; k < kSsimWindow; ++k) {
      const double* src = tmp.Row(y + k);
      for (size_t x = 0; x < ow; ++x) dst[x] += taps[k] * src[x];
    }
  }
  return out;
}

double SsimPlane(const Plane& a, const Plane& b) {
  const size_t n = a.size();
  Plane x(a.width(), a.height()), y(a.width(), a.height());
  Plane xx(a.width(), a.height()), yy(a.width(), a.height()),
      xy(a.width(), a.height());
  for (size_t i = 0; i < n; ++i) {
    const double u = 255.0 * a.data()[i];
    const double v = 255.0 * b.data()[i];
    x.data()[i] = u;
    y.data()[i] = v;
    xx.data()[i] = u * u;
    yy.data()[i] = v * v;
    xy.data()[i] = u * v;
  }
  const auto taps = SsimTaps();
  const Plane mx = FilterValid(x, taps);
  const Plane my = FilterValid(y, taps);
  const Plane sxx = FilterValid(xx, taps);
  const Plane syy = FilterValid(yy, taps);
  const Plane sxy = FilterValid(xy, taps);
  double sum = 0.0;
  for (size_t i = 0; i < mx.size(); ++i) {
    const double mux = mx.data()[i];
    const double muy = my.data()[i];
    const double vx = sxx.data()[i] - mux * mux;
    const double vy = syy.data()[i] - muy * muy;
    const double cov = sxy.data()[i] - mux * muy;
    sum += ((2.0 * mux * muy + kSsimC1) * (2.0 * cov + kSsimC2)) /
           ((mux * mux + muy * muy + kSsimC1) * (vx + vy + kSsimC2));
  }
  return sum / static_cast<double>(mx.size());
}

}  // namespace

double Ssim(std::span<const Plane> hr, std::span<const Plane> sr) {
  CheckSameShape(hr, sr, "SSIM");
  if (hr[0].width() < kSsimWindow || hr[0].height() < kSsimWindow) {
    throw Error(ErrorCode::kTooSmall,
                "SSIM needs images of at least 11x11 pixels");
  }
  double total = 0.0;
  for (size_t c = 0; c < hr.size(); ++c) total += SsimPlane(hr[c], sr[c]);
  return total / static_cast<double>(hr.size());
}

double Ssim(const LumaPlane& hr, const LumaPlane& sr) {
  return Ssim(hr.planes(), sr.planes());
}

double PerceptualIndex(double ma, double niqe) {
  if (!(ma >= 0.0 && ma <= 10.0)) {
    throw Error(ErrorCode::kInvalidArgument, "Ma score must lie in [0, 10]");
  }
  if (!(niqe >= 0.0) || !std::isfinite(niqe)) {
    throw Error(ErrorCode::kInvalidArgument, "NIQE must be finite and >= 0");
  }
  return ((10.0 - ma) + niqe) / 2.0;
}

MaScoreProvider::MaScoreProvider(std::map<std::string, double> scores)
    : scores_(std::move(scores)) {
  for (const auto& [id, s] : scores_) {
    if (!(s >= 0.0 && s <= 10.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "Ma score for '" + id + "' outside [0, 10]");
    }
  }
}

namespace {

std::string Trim(std::string s) {
  const char* ws = " \t\r\n";
  s.erase(0, s.find_first_not_of(ws));
  const size_t end = s.find_last_not_of(ws);
  s.erase(end == std::string::npos ? 0 : end + 1);
  return s;
}

}  // namespace

MaScoreProvider MaScoreProvider::FromCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kFileNotFound,
                "cannot open Ma score file " + path.string());
  }
  std::map<std::string, double> scores;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = Trim(line);
    if (line.empty()) continue;
    const size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::kParseFailure, path.string() + ":" +
                                                std::to_string(line_no) +
                                                ": expected 'image_id,score'");
    }
    const std::string id = Trim(line.substr(0, comma));
    const std::string value = Trim(line.substr(comma + 1));
    size_t used = 0;
    double score = 0.0;
    try {
      score = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) {
      if (line_no == 1) continue;  // header
      throw Error(ErrorCode::kParseFailure, path.string() + ":" +
                                                std::to_string(line_no) +
                                                ": score is not a number");
    }
    if (!(score >= 0.0 && score <= 10.0)) {
      throw Error(ErrorCode::kParseFailure, path.string() + ":" +
                                                std::to_string(line_no) +
                                                ": score outside [0, 10]");
    }
    scores[id] = score;
  }
  return MaScoreProvider(std::move(scores));
}

std::optional<double> MaScoreProvider::Lookup(
    const std::string& image_id) const {
  auto it = scores_.find(image_id);
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

MetricReport EvaluatePair(const ImageBuffer& hr_in, const ImageBuffer& sr,
                          const EvalProtocol& protocol,
                          const NiqeModel* niqe_model,
                          const MaScoreProvider* ma,
                          const std::string& image_id) {
  if (protocol.scale < 1 || protocol.border_discard < 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid evaluation protocol");
  }
  ImageBuffer hr = hr_in;
  if (hr.width() != sr.width() || hr.height() != sr.height()) {
    ImageBuffer cropped =
        CropToMultiple(hr, static_cast<size_t>(protocol.scale));
    if (cropped.width() != sr.width() || cropped.height() != sr.height()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "HR " + std::to_string(hr.width()) + "x" +
                      std::to_string(hr.height()) + " vs SR " +
                      std::to_string(sr.width()) + "x" +
                      std::to_string(sr.height()));
    }
    hr = std::move(cropped);
  }
  const size_t border = static_cast<size_t>(protocol.border_discard);
  const LumaPlane sr_luma = CropBorder(ToLuma(sr), border);

  std::vector<Plane> a, b;
  if (protocol.channel_mode == ChannelMode::kLuma) {
    a.push_back(CropBorder(ToLuma(hr), border).plane());
    b.push_back(sr_luma.plane());
  } else {
    if (hr.channels() != sr.channels()) {
      throw Error(ErrorCode::kShapeMismatch, "HR and SR channel counts differ");
    }
    const ImageBuffer hc = CropBorder(hr, border);
    const ImageBuffer sc = CropBorder(sr, border);
    a.assign(hc.planes().begin(), hc.planes().end());
    b.assign(sc.planes().begin(), sc.planes().end());
  }

  MetricReport r;
  r.eval_width = a[0].width();
  r.eval_height = a[0].height();
  r.rmse = Rmse(a, b);
  r.psnr = PsnrFromRmse(r.rmse);
  if (r.eval_width >= kSsimWindow && r.eval_height >= kSsimWindow) {
    r.ssim = Ssim(a, b);
  }
  if (niqe_model != nullptr && sr_luma.width() >= niqe_model->patch_size &&
      sr_luma.height() >= niqe_model->patch_size) {
    r.niqe = Niqe(sr_luma, *niqe_model);
  }
  if (ma != nullptr) r.ma = ma->Lookup(image_id);
  if (r.ma && r.niqe) r.pi = PerceptualIndex(*r.ma, *r.niqe);
  return r;
}

}  // namespace pcl_sr
