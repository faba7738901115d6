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

#include <gtest/gtest.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "pcl_sr/error.h"
#include "pcl_sr/image.h"
#include "pcl_sr/png_io.h"

namespace pcl_sr {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class DatasetTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("pcl_sr_dataset_" + std::to_string(::getpid()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(root_ / "hr");
    fs::create_directories(root_ / "sr");
  }
  void TearDown() override { fs::remove_all(root_); }

  void Put(const std::string& dir, const std::string& stem,
           const ImageBuffer& img) {
    SavePng(img, root_ / dir / (stem + ".png"));
  }

  fs::path root_;
};

TEST_F(DatasetTest, PairsByStemInOrder) {
  const ImageBuffer img(8, 8, 1, 0.5);
  for (const char* s : {"b", "a"}) {
    Put("hr", s, img);
    Put("sr", s, img);
  }
  std::ofstream(root_ / "hr" / "notes.txt") << "ignored";
  const DatasetManifest m = ScanDataset(root_ / "hr", root_ / "sr");
  ASSERT_EQ(m.pairs.size(), 2u);
  EXPECT_EQ(m.pairs[0].id, "a");
  EXPECT_EQ(m.pairs[1].id, "b");
  EXPECT_TRUE(m.unmatched_hr.empty());
  EXPECT_EQ(m.name, "hr");
}

TEST_F(DatasetTest, ReportsUnmatched) {
  const ImageBuffer img(8, 8, 1, 0.5);
  Put("hr", "a", img);
  Put("hr", "b", img);
  Put("sr", "a", img);
  const DatasetManifest m = ScanDataset(root_ / "hr", root_ / "sr");
  EXPECT_EQ(m.pairs.size(), 1u);
  ASSERT_EQ(m.unmatched_hr.size(), 1u);
  EXPECT_EQ(m.unmatched_hr[0].stem(), "b");
}

TEST_F(DatasetTest, NoOverlapOrMissingDirFails) {
  const ImageBuffer img(8, 8, 1, 0.5);
  Put("hr", "a", img);
  Put("sr", "b", img);
  EXPECT_THROW(ScanDataset(root_ / "hr", root_ / "sr"), Error);
  try {
    ScanDataset(root_ / "nope", root_ / "sr");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFileNotFound);
  }
}

TEST(BaselineTest, ConstantStaysConstant) {
  const ImageBuffer sr =
      MakeBicubicBaselineImage(ImageBuffer(40, 24, 3, 0.6), 4);
  EXPECT_EQ(sr.width(), 40u);
  for (const Plane& p : sr.planes()) {
    for (double v : p.data()) EXPECT_EQ(v, 153.0 / 255.0);
  }
}

TEST(BaselineTest, CropsToScaleMultiple) {
  std::mt19937_64 rng(71);
  const ImageBuffer sr =
      MakeBicubicBaselineImage(testing::SyntheticScene(rng, 101, 101, 3), 4);
  EXPECT_EQ(sr.width(), 100u);
  EXPECT_EQ(sr.height(), 100u);
  EXPECT_THROW(MakeBicubicBaselineImage(ImageBuffer(3, 8, 1, 0.0), 4), Error);
}

TEST_F(DatasetTest, BaselineDirectoryContinuesPastFailures) {
  std::mt19937_64 rng(72);
  Put("hr", "big", testing::SyntheticScene(rng, 33, 30, 3));
  Put("hr", "tiny", ImageBuffer(2, 2, 1, 0.1));
  std::ofstream(root_ / "hr" / "broken.png") << "not a png";
  const BaselineOutcome o = MakeBicubicBaseline(root_ / "hr", 4, root_ / "out");
  EXPECT_EQ(o.written, 1u);
  EXPECT_EQ(o.failures.size(), 2u);
  const ImageBuffer out = LoadPng(root_ / "out" / "big.png");
  EXPECT_EQ(out.width(), 32u);
  EXPECT_EQ(out.height(), 28u);
}

TEST_F(DatasetTest, IdenticalPairsGivePerfectMeans) {
  std::mt19937_64 rng(73);
  for (const char* s : {"x", "y", "z"}) {
    const ImageBuffer img = testing::SyntheticScene(rng, 40, 36, 3);
    Put("hr", s, img);
    Put("sr", s, img);
  }
  const AggregateReport r =
      EvaluateDataset(ScanDataset(root_ / "hr", root_ / "sr"), {}, nullptr);
  EXPECT_EQ(r.mean.count, 3u);
  EXPECT_EQ(r.mean.rmse, 0.0);
  EXPECT_NEAR(*r.mean.ssim, 1.0, 1e-12);
  EXPECT_FALSE(r.mean.psnr.has_value());
  EXPECT_EQ(r.mean.psnr_infinite, 3u);
}

TEST_F(DatasetTest, SinglePairMeanIsThePair) {
  std::mt19937_64 rng(74);
  Put("hr", "only", testing::SyntheticScene(rng, 48, 48, 3));
  Put("sr", "only", testing::RandomImage(rng, 48, 48, 3));
  const AggregateReport r =
      EvaluateDataset(ScanDataset(root_ / "hr", root_ / "sr"), {}, nullptr);
  const MetricReport& p = *r.per_image[0].report;
  EXPECT_EQ(r.mean.rmse, p.rmse);
  EXPECT_EQ(r.mean.psnr, p.psnr);
  EXPECT_EQ(r.mean.ssim, p.ssim);
}

TEST_F(DatasetTest, FailuresAreCountedAndExcluded) {
  std::mt19937_64 rng(75);
  Put("hr", "good", testing::SyntheticScene(rng, 32, 32, 3));
  Put("sr", "good", testing::SyntheticScene(rng, 32, 32, 3));
  Put("hr", "bad", testing::SyntheticScene(rng, 32, 32, 3));
  Put("sr", "bad", testing::SyntheticScene(rng, 20, 32, 3));
  const AggregateReport r = EvaluateDataset(
      ScanDataset(root_ / "hr", root_ / "sr"), {}, nullptr, nullptr, 2);
  EXPECT_EQ(r.failure_count, 1u);
  EXPECT_EQ(r.mean.count, 1u);
  EXPECT_TRUE(r.per_image[0].error.has_value());  // "bad" sorts first
}

TEST_F(DatasetTest, ThreadCountDoesNotChangeReport) {
  std::mt19937_64 rng(76);
  for (int i = 0; i < 6; ++i) {
    const std::string s = "img" + std::to_string(i);
    Put("hr", s, testing::SyntheticScene(rng, 36, 40, 3));
    Put("sr", s, testing::SyntheticScene(rng, 36, 40, 3));
  }
  const DatasetManifest m = ScanDataset(root_ / "hr", root_ / "sr");
  EXPECT_EQ(ReportToJson(EvaluateDataset(m, {}, nullptr, nullptr, 1)),
            ReportToJson(EvaluateDataset(m, {}, nullptr, nullptr, 4)));
}

double Round4(double v) { return std::round(v * 1e4) / 1e4; }

TEST_F(DatasetTest, JsonSchemaAndMeansRecompute) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 5; ++i) {
    const std::string s = "p" + std::to_string(i);
    const ImageBuffer hr = testing::SyntheticScene(rng, 48, 44, 3);
    Put("hr", s, hr);
    Put("sr", s, i == 2 ? hr : testing::SyntheticScene(rng, 48, 44, 3));
  }
  const AggregateReport r =
      EvaluateDataset(ScanDataset(root_ / "hr", root_ / "sr"), {}, nullptr);
  const json j = json::parse(ReportToJson(r));
  EXPECT_EQ(j.at("dataset"), "hr");
  EXPECT_EQ(j.at("protocol").at("scale"), 4);
  EXPECT_EQ(j.at("protocol").at("border"), 4);
  EXPECT_EQ(j.at("protocol").at("channel"), "y");
  ASSERT_EQ(j.at("per_image").size(), 5u);
  EXPECT_TRUE(j.at("failures").empty());

  double rmse = 0, psnr = 0, ssim = 0;
  int finite = 0;
  for (const json& row : j.at("per_image")) {
    for (const char* k : {"id", "hr", "sr", "rmse", "psnr", "ssim", "niqe",
                          "ma", "pi", "width", "height"}) {
      EXPECT_TRUE(row.contains(k)) << k;
    }
    EXPECT_TRUE(row.at("niqe").is_null());
    EXPECT_EQ(row.at("width"), 40);
    rmse += row.at("rmse").get<double>();
    ssim += row.at("ssim").get<double>();
    if (row.at("psnr").is_string()) {
      EXPECT_EQ(row.at("psnr"), "inf");
    } else {
      psnr += row.at("psnr").get<double>();
      ++finite;
    }
  }
  const json& mean = j.at("mean");
  EXPECT_EQ(mean.at("count"), 5);
  EXPECT_EQ(mean.at("psnr_infinite"), 1);
  EXPECT_EQ(mean.at("rmse").get<double>(), Round4(rmse / 5));
  EXPECT_EQ(mean.at("ssim").get<double>(), Round4(ssim / 5));
  EXPECT_EQ(mean.at("psnr").get<double>(), Round4(psnr / finite));
}

TEST_F(DatasetTest, CsvHasHeaderRowsAndMean) {
  std::mt19937_64 rng(78);
  Put("hr", "a", testing::SyntheticScene(rng, 32, 32, 1));
  Put("sr", "a", testing::SyntheticScene(rng, 32, 32, 1));
  const std::string csv = ReportToCsv(
      EvaluateDataset(ScanDataset(root_ / "hr", root_ / "sr"), {}, nullptr));
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "id,rmse,psnr,ssim,niqe,ma,pi,error");
  EXPECT_EQ(lines[1].substr(0, 2), "a,");
  EXPECT_EQ(lines[2].substr(0, 5), "mean,");
}

}  // namespace
}  // namespace pcl_sr
