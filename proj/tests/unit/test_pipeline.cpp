// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "fdnn/error.hpp"
#include "fdnn/io.hpp"
#include "fdnn/pipeline.hpp"
#include "fdnn/synth.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fdnn;
namespace fs = std::filesystem;

namespace {

class PipelineTest : public ::testing::Test {
protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("fdnn_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    SynthConfig s;
    s.num_images = 25;
    s.seed = 3;
    write_synth_corpus(generate(s), (root_ / "corpus").string());
  }
  void TearDown() override { fs::remove_all(root_); }

  PipelineConfig base() const {
    PipelineConfig c;
    c.detections = (root_ / "corpus/detections.jsonl").string();
    c.opinions = {(root_ / "corpus/opinions_0.jsonl").string(),
                  (root_ / "corpus/opinions_1.jsonl").string()};
    c.ground_truth = (root_ / "corpus/gt.jsonl").string();
    c.masks = (root_ / "corpus/masks").string();
    c.output_dir = (root_ / "out").string();
    return c;
  }

  fs::path root_;
};

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

} // namespace

TEST_F(PipelineTest, IdentityFusionLeavesScores) {
  auto cfg = base();
  cfg.fusion = FusionKind::Weights;
  cfg.weights.w = {0.0, 0.0};
  cfg.segfusion = SegFusionMode::Off;
  const auto result = run_pipeline(cfg);
  const auto input = read_detections_file(cfg.detections);
  ASSERT_EQ(result.fused.size(), input.size());
  for (std::size_t i = 0; i < input.size(); ++i)
    EXPECT_EQ(result.fused[i].score, input[i].score);
  EXPECT_EQ(read_detections_file((root_ / "out/fused_detections.jsonl").string()), input);
}

TEST_F(PipelineTest, NoFusionNoSegmentation) {
  auto cfg = base();
  cfg.fusion = FusionKind::None;
  cfg.opinions.clear();
  const auto result = run_pipeline(cfg);
  EXPECT_EQ(result.fused, read_detections_file(cfg.detections));
  ASSERT_TRUE(result.ablation);
  EXPECT_EQ(result.ablation->variants, (std::vector<std::string>{"CG"}));
}

TEST_F(PipelineTest, ReportHasOneCellPerSetting) {
  auto cfg = base();
  cfg.segfusion = SegFusionMode::Kernel;
  cfg.kernel_rows = 16;
  cfg.kernel_cols = 8;
  cfg.settings = {"Reasonable", "All", "Near"};
  const auto result = run_pipeline(cfg);
  ASSERT_TRUE(result.ablation);
  EXPECT_EQ(result.ablation->variants,
            (std::vector<std::string>{"CG", "CG+fusion", "CG+fusion+seg"}));
  const std::string csv = slurp(root_ / "out/report.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 * 3);
  for (const char *f : {"report.txt", "kernel.txt", "curves_reasonable.svg", "curves_all.svg",
                        "curve_cg_fusion_seg_near.csv"})
    EXPECT_TRUE(fs::exists(root_ / "out" / f)) << f;
}

TEST_F(PipelineTest, LegacyMode) {
  auto cfg = base();
  cfg.segfusion = SegFusionMode::Legacy;
  const auto result = run_pipeline(cfg);
  EXPECT_EQ(result.ablation->variants.back(), "CG+fusion+seg");
}

TEST_F(PipelineTest, MalformedDetectionLineCited) {
  {
    std::ofstream f(root_ / "corpus/detections.jsonl", std::ios::app);
    f << R"({"image_id":"img00000","id":"bad","class":1,"x":0,"y":0,"w":-3,"h":5,"score":0.5})"
      << '\n';
  }
  try {
    run_pipeline(base());
    FAIL() << "expected a parse error";
  } catch (const ParseError &e) {
    EXPECT_GT(e.line(), 0u);
    EXPECT_NE(std::string(e.what()).find("width"), std::string::npos);
  }
}

TEST_F(PipelineTest, ConfigValidation) {
  auto cfg = base();
  cfg.detections = (root_ / "missing.jsonl").string();
  EXPECT_THROW(run_pipeline(cfg), ValidationError);
  cfg = base();
  cfg.fusion = FusionKind::Weights;
  cfg.weights.w = {1.0};
  EXPECT_THROW(run_pipeline(cfg), ValidationError);
  cfg = base();
  cfg.fusion = FusionKind::Network;
  EXPECT_THROW(run_pipeline(cfg), ValidationError);
  cfg = base();
  cfg.settings = {"Nonsense"};
  EXPECT_THROW(run_pipeline(cfg), ValidationError);
}

TEST_F(PipelineTest, Deterministic) {
  auto cfg = base();
  cfg.segfusion = SegFusionMode::Kernel;
  cfg.kernel_rows = 16;
  cfg.kernel_cols = 8;
  const auto first = run_pipeline(cfg);
  std::vector<std::string> a;
  for (const auto &f : first.written)
    a.push_back(slurp(f));
  const auto second = run_pipeline(cfg);
  ASSERT_EQ(first.written, second.written);
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_EQ(a[i], slurp(second.written[i])) << first.written[i];
}

TEST(FileSlug, Examples) {
  EXPECT_EQ(file_slug("Occ.partial"), "occ_partial");
  EXPECT_EQ(file_slug("CG+fusion+seg"), "cg_fusion_seg");
  EXPECT_EQ(file_slug("KITTI.easy"), "kitti_easy");
}
