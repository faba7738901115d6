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

// pcl_srtool: command-line front end for SR evaluation, content losses,
// bicubic baselines, perception-distortion sweeps and NIQE model fitting.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pcl_sr/dataset.h"
#include "pcl_sr/dct.h"
#include "pcl_sr/error.h"
#include "pcl_sr/image.h"
#include "pcl_sr/image_ops.h"
#include "pcl_sr/losses.h"
#include "pcl_sr/metrics.h"
#include "pcl_sr/niqe.h"
#include "pcl_sr/pd_explorer.h"
#include "pcl_sr/png_io.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using pcl_sr::Error;
using pcl_sr::ErrorCode;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

// Thrown for argument combinations CLI11 cannot check on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

size_t ThreadCount() {
  const char* env = std::getenv("PCL_SRTOOL_THREADS");
  const size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (env == nullptr || *env == '\0') return hw;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) {
    throw UsageError("PCL_SRTOOL_THREADS must be a positive integer");
  }
  return std::min(hw, static_cast<size_t>(v));
}

pcl_sr::LossWeights ParseWeights(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw UsageError("bad weight '" + item + "' in --weights " + text);
    }
    v.push_back(x);
  }
  if (v.size() != 4) {
    throw UsageError("--weights needs four values wc,wd,wdct,wadv, got " +
                     text);
  }
  pcl_sr::LossWeights w{v[0], v[1], v[2], v[3]};
  try {
    w.Validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return w;
}

ordered_json WeightsJson(const pcl_sr::LossWeights& w) {
  return {{"content", w.content},
          {"differential", w.differential},
          {"dct", w.dct},
          {"adversarial", w.adversarial}};
}

struct DctFlags {
  std::string norm = "raw";
  std::string block = "full";

  void Add(CLI::App* app) {
    app->add_option("--dct-norm", norm, "DCT normalisation")
        ->check(CLI::IsMember({"ortho", "raw"}))
        ->capture_default_str();
    app->add_option("--dct-block", block, "whole-image DCT or 8x8 blocks")
        ->check(CLI::IsMember({"full", "8"}))
        ->capture_default_str();
  }
  pcl_sr::DctConfig Config() const {
    return {norm == "ortho" ? pcl_sr::DctNorm::kOrthonormal
                            : pcl_sr::DctNorm::kUnnormalized,
            block == "8" ? pcl_sr::DctMode::kBlockwise8x8
                         : pcl_sr::DctMode::kFullImage};
  }
};

void WriteText(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  const fs::path p(out);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p);
  f << text;
  if (!f) throw Error(ErrorCode::kIoFailure, "cannot write " + out);
}

// ---- evaluate ----

struct EvaluateArgs {
  std::string hr, sr, out, niqe_model, ma_scores;
  int scale = 4;
  int border = 4;
  std::string channel = "y";
  std::string format = "json";
};

int RunEvaluate(const EvaluateArgs& a) {
  pcl_sr::EvalProtocol protocol;
  protocol.scale = a.scale;
  protocol.border_discard = a.border;
  protocol.channel_mode = a.channel == "rgb" ? pcl_sr::ChannelMode::kRgb
                                             : pcl_sr::ChannelMode::kLuma;
  std::optional<pcl_sr::NiqeModel> model;
  if (!a.niqe_model.empty()) model = pcl_sr::LoadNiqeModel(a.niqe_model);
  std::optional<pcl_sr::MaScoreProvider> ma;
  if (!a.ma_scores.empty()) ma = pcl_sr::MaScoreProvider::FromCsv(a.ma_scores);

  const pcl_sr::DatasetManifest manifest = pcl_sr::ScanDataset(a.hr, a.sr);
  for (const auto& p : manifest.unmatched_hr) {
    std::cerr << "warning: no SR image for " << p.string() << "\n";
  }
  for (const auto& p : manifest.unmatched_sr) {
    std::cerr << "warning: no HR image for " << p.string() << "\n";
  }
  const pcl_sr::AggregateReport report =
      pcl_sr::EvaluateDataset(manifest, protocol, model ? &*model : nullptr,
                              ma ? &*ma : nullptr, ThreadCount());
  for (const auto& o : report.per_image) {
    if (o.error)
      std::cerr << "error: " << o.pair.id << ": " << *o.error << "\n";
  }
  WriteText(a.format == "csv" ? pcl_sr::ReportToCsv(report)
                              : pcl_sr::ReportToJson(report),
            a.out);
  return report.failure_count == 0 ? kExitOk : kExitData;
}

// ---- losses ----

struct LossesArgs {
  std::string hr, sr, out, weights;
  std::string channel = "rgb";
  double eps = pcl_sr::SmoothingEps{}.eps;
  std::optional<double> d;
  std::string d_form = "prob";
  DctFlags dct;
};

int RunLosses(const LossesArgs& a) {
  pcl_sr::LossWeights weights;
  std::vector<std::string> notes;
  if (!a.weights.empty()) {
    weights = ParseWeights(a.weights);
    if (weights.adversarial > 0 && !a.d) {
      throw UsageError("an adversarial weight needs --d");
    }
  } else if (!a.d) {
    weights.adversarial = 0.0;
    notes.push_back(
        "no discriminator output given; adversarial weight set to 0");
  }

  pcl_sr::ImageBuffer hr = pcl_sr::LoadPng(a.hr);
  const pcl_sr::ImageBuffer sr = pcl_sr::LoadPng(a.sr);
  if (hr.channels() != sr.channels()) {
    throw Error(ErrorCode::kShapeMismatch, "HR and SR channel counts differ");
  }
  if (!hr.SameShape(sr) && hr.width() >= sr.width() &&
      hr.height() >= sr.height()) {
    // SR produced from an HR that was cropped to a multiple of the scale.
    hr = pcl_sr::CenterCrop(hr, sr.width(), sr.height());
    notes.push_back("HR centre-cropped to " + std::to_string(sr.width()) + "x" +
                    std::to_string(sr.height()));
  }
  std::vector<pcl_sr::Plane> hr_planes, sr_planes;
  if (a.channel == "y") {
    hr_planes.push_back(pcl_sr::ToLuma(hr).plane());
    sr_planes.push_back(pcl_sr::ToLuma(sr).plane());
  } else {
    hr_planes.assign(hr.planes().begin(), hr.planes().end());
    sr_planes.assign(sr.planes().begin(), sr.planes().end());
  }
  std::optional<pcl_sr::DiscriminatorOutput> d;
  if (a.d) {
    d = pcl_sr::DiscriminatorOutput{
        *a.d, a.d_form == "logit" ? pcl_sr::DiscriminatorForm::kLogit
                                  : pcl_sr::DiscriminatorForm::kProbability};
  }
  const pcl_sr::CombinedLoss loss = pcl_sr::ComputeCombinedLoss(
      hr_planes, sr_planes, weights, a.dct.Config(), {a.eps}, d);

  ordered_json j;
  j["hr"] = a.hr;
  j["sr"] = a.sr;
  j["channel"] = a.channel;
  j["width"] = sr.width();
  j["height"] = sr.height();
  j["weights"] = WeightsJson(weights);
  j["dct"] = {{"norm", a.dct.norm}, {"block", a.dct.block}};
  j["content"] = loss.report.content;
  j["differential"] = loss.report.differential;
  j["dct_loss"] = loss.report.dct;
  j["adversarial"] = loss.report.adversarial
                         ? ordered_json(*loss.report.adversarial)
                         : ordered_json(nullptr);
  j["total"] = loss.report.total;
  j["gradient_max_abs"] = loss.gradient.MaxAbs();
  j["notes"] = notes;
  WriteText(j.dump(2) + "\n", a.out);
  return kExitOk;
}

// ---- bicubic ----

struct BicubicArgs {
  std::string hr, out;
  int scale = 4;
};

int RunBicubic(const BicubicArgs& a) {
  const pcl_sr::BaselineOutcome o =
      pcl_sr::MakeBicubicBaseline(a.hr, a.scale, a.out);
  for (const auto& f : o.failures) {
    std::cerr << "error: " << f.id << ": " << f.error << "\n";
  }
  std::cerr << "wrote " << o.written << " image(s) to " << a.out << "\n";
  return o.failures.empty() ? kExitOk : kExitData;
}

// ---- pd-sweep ----

struct SweepArgs {
  std::string hr, start, out, niqe_model;
  std::vector<std::string> weights;
  int scale = 4;
  pcl_sr::DescentConfig descent;
  DctFlags dct;
};

std::string FormatNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

int RunSweep(const SweepArgs& a) {
  std::vector<pcl_sr::LossWeights> list;
  for (const auto& w : a.weights) list.push_back(ParseWeights(w));
  if (list.empty()) list.push_back({1, 0, 0, 0});
  try {
    a.descent.Validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  std::optional<pcl_sr::NiqeModel> model;
  if (!a.niqe_model.empty()) model = pcl_sr::LoadNiqeModel(a.niqe_model);

  pcl_sr::ImageBuffer hr = pcl_sr::LoadPng(a.hr);
  pcl_sr::ImageBuffer start;
  if (a.start.empty()) {
    start = pcl_sr::MakeBicubicBaselineImage(hr, a.scale);
    hr = pcl_sr::CropToMultiple(hr, a.scale);
  } else {
    start = pcl_sr::LoadPng(a.start);
    if (!hr.SameShape(start))
      hr = pcl_sr::CenterCrop(hr, start.width(), start.height());
  }

  const pcl_sr::SweepResult result =
      pcl_sr::Sweep(hr, start, list, a.descent, a.dct.Config(),
                    model ? &*model : nullptr, ThreadCount());

  fs::create_directories(a.out);
  std::ostringstream csv;
  csv << "index,w_c,w_d,w_dct,w_adv,rmse,niqe,content,differential,dct,steps,"
         "status\n";
  bool failed = false;
  for (size_t i = 0; i < result.points.size(); ++i) {
    const pcl_sr::SweepPoint& p = result.points[i];
    csv << i << ',' << FormatNumber(p.weights.content) << ','
        << FormatNumber(p.weights.differential) << ','
        << FormatNumber(p.weights.dct) << ','
        << FormatNumber(p.weights.adversarial) << ',';
    if (p.error) {
      failed = true;
      std::string msg = *p.error;
      std::replace(msg.begin(), msg.end(), '"', '\'');
      csv << ",,,,,,\"" << msg << "\"\n";
      std::cerr << "error: sweep point " << i << ": " << *p.error << "\n";
      continue;
    }
    csv << FormatNumber(p.rmse) << ','
        << (p.niqe ? FormatNumber(*p.niqe) : std::string()) << ','
        << FormatNumber(p.report.content) << ','
        << FormatNumber(p.report.differential) << ','
        << FormatNumber(p.report.dct) << ',' << p.steps << ",ok\n";
    std::ostringstream trace;
    trace << "step,objective\n";
    for (size_t t = 0; t < p.trace.size(); ++t) {
      trace << t << ',' << FormatNumber(p.trace[t]) << '\n';
    }
    WriteText(
        trace.str(),
        (fs::path(a.out) / ("trace_" + std::to_string(i) + ".csv")).string());
  }
  WriteText(csv.str(), (fs::path(a.out) / "sweep.csv").string());
  if (a.weights.empty()) {
    std::cerr << "note: no --weights given; swept content-only (1,0,0,0)\n";
  }
  return failed ? kExitData : kExitOk;
}

// ---- niqe-fit ----

struct NiqeFitArgs {
  std::string corpus, out;
  size_t patch_size = pcl_sr::kNiqeDefaultPatchSize;
};

int RunNiqeFit(const NiqeFitArgs& a) {
  std::vector<pcl_sr::ImageBuffer> corpus;
  for (const auto& p : pcl_sr::ListPngFiles(a.corpus)) {
    corpus.push_back(pcl_sr::LoadPng(p));
  }
  const pcl_sr::NiqeModel model = pcl_sr::FitNiqeModel(corpus, a.patch_size);
  if (model.Degenerate()) {
    std::cerr << "warning: fitted covariance is zero; the corpus has no "
                 "variation\n";
  }
  pcl_sr::SaveNiqeModel(model, a.out);
  std::cerr << "fitted NIQE model from " << corpus.size() << " image(s) -> "
            << a.out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Super-resolution evaluation and perceptual loss toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  EvaluateArgs ev;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Evaluate an SR directory against HR");
  evaluate->add_option("--hr", ev.hr, "HR image directory")->required();
  evaluate->add_option("--sr", ev.sr, "SR image directory")->required();
  evaluate->add_option("--out", ev.out, "report file (default stdout)");
  evaluate->add_option("--scale", ev.scale, "upscaling factor")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  evaluate->add_option("--border", ev.border, "pixels discarded on every side")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  evaluate->add_option("--channel", ev.channel, "evaluate luma or RGB")
      ->check(CLI::IsMember({"y", "rgb"}))
      ->capture_default_str();
  evaluate->add_option("--niqe-model", ev.niqe_model, "NIQE model file");
  evaluate->add_option("--ma-scores", ev.ma_scores,
                       "image_id,score CSV of Ma scores");
  evaluate->add_option("--format", ev.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  LossesArgs lo;
  CLI::App* losses = app.add_subcommand(
      "losses", "Content and adversarial losses of one HR/SR pair");
  losses->add_option("--hr", lo.hr, "HR PNG")->required();
  losses->add_option("--sr", lo.sr, "SR PNG")->required();
  losses->add_option("--out", lo.out, "JSON file (default stdout)");
  losses->add_option("--weights", lo.weights,
                     "wc,wd,wdct,wadv (default 1,1,1,0.001)");
  losses->add_option("--channel", lo.channel, "luma or RGB planes")
      ->check(CLI::IsMember({"y", "rgb"}))
      ->capture_default_str();
  losses->add_option("--eps", lo.eps, "Charbonnier smoothing for gradients")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  losses->add_option("--d", lo.d, "discriminator output for the SR image");
  losses->add_option("--d-form", lo.d_form, "discriminator output form")
      ->check(CLI::IsMember({"prob", "logit"}))
      ->capture_default_str();
  lo.dct.Add(losses);

  BicubicArgs bi;
  CLI::App* bicubic =
      app.add_subcommand("bicubic", "Generate bicubic baseline SR images");
  bicubic->add_option("--hr", bi.hr, "HR image directory")->required();
  bicubic->add_option("--out", bi.out, "output directory")->required();
  bicubic->add_option("--scale", bi.scale, "downscaling factor")
      ->check(CLI::Range(2, 64))
      ->capture_default_str();

  SweepArgs sw;
  CLI::App* sweep = app.add_subcommand(
      "pd-sweep", "Descend on loss weightings and record RMSE/NIQE");
  sweep->add_option("--hr", sw.hr, "HR PNG")->required();
  sweep->add_option("--start", sw.start,
                    "start image (default: bicubic baseline of HR)");
  sweep->add_option("--out", sw.out, "output directory")->required();
  sweep->add_option("--weights", sw.weights,
                    "wc,wd,wdct,wadv; repeat for more points");
  sweep
      ->add_option("--scale", sw.scale,
                   "baseline factor when --start is absent")
      ->check(CLI::Range(2, 64))
      ->capture_default_str();
  sweep->add_option("--niqe-model", sw.niqe_model, "NIQE model file");
  sweep->add_option("--max-steps", sw.descent.max_steps, "descent step limit")
      ->capture_default_str();
  sweep
      ->add_option("--initial-step", sw.descent.initial_step,
                   "first trial step")
      ->capture_default_str();
  sweep
      ->add_option("--stop-tol", sw.descent.stop_tol,
                   "minimum objective decrease")
      ->capture_default_str();
  sweep->add_option("--eps", sw.descent.eps.eps, "Charbonnier smoothing")
      ->capture_default_str();
  sw.dct.Add(sweep);

  NiqeFitArgs nf;
  CLI::App* niqe_fit =
      app.add_subcommand("niqe-fit", "Fit a NIQE model to pristine images");
  niqe_fit->add_option("--hr,--corpus", nf.corpus, "directory of pristine PNGs")
      ->required();
  niqe_fit->add_option("--out", nf.out, "model file")->required();
  niqe_fit->add_option("--patch-size", nf.patch_size, "patch side")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*evaluate) return RunEvaluate(ev);
    if (*losses) return RunLosses(lo);
    if (*bicubic) return RunBicubic(bi);
    if (*sweep) return RunSweep(sw);
    if (*niqe_fit) return RunNiqeFit(nf);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n"
              << app.get_subcommands().front()->help();
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error [" << pcl_sr::ErrorCodeName(e.code())
              << "]: " << e.what() << "\n";
    return e.code() == ErrorCode::kNumericFailure ? kExitNumeric : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
