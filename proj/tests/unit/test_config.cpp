// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "fdnn/config.hpp"
#include "fdnn/error.hpp"
#include "fdnn/pipeline.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace fdnn;

namespace {

IniConfig ini_of(const std::string &text) {
  std::stringstream ss(text);
  return IniConfig::parse(ss, "test.ini");
}

} // namespace

TEST(Config, TypedAccessors) {
  const auto ini = ini_of("; comment\n[a]\nx = 1.5\nn = 42\nf = yes\nl = p, q ,r\nempty =\n");
  EXPECT_EQ(ini.real("a.x", 0), 1.5);
  EXPECT_EQ(ini.integer("a.n", 0), 42);
  EXPECT_TRUE(ini.flag("a.f", false));
  EXPECT_EQ(ini.list("a.l"), (std::vector<std::string>{"p", "q", "r"}));
  EXPECT_FALSE(ini.has("a.empty"));
  EXPECT_EQ(ini.real("a.empty", 7.0), 7.0);
  EXPECT_EQ(ini.text("b.missing", "dflt"), "dflt");
}

TEST(Config, BadValuesAreValidationErrors) {
  const auto ini = ini_of("[a]\nx = abc\nn = 4.5\nf = maybe\n");
  EXPECT_THROW(ini.real("a.x", 0), ValidationError);
  EXPECT_THROW(ini.integer("a.n", 0), ValidationError);
  EXPECT_THROW(ini.flag("a.f", false), ValidationError);
  EXPECT_THROW(ini_of("[a\nx=1\n"), ValidationError);
  EXPECT_THROW(IniConfig::load("/nonexistent/x.ini"), ValidationError);
}

TEST(Config, AnchorJob) {
  const auto job = anchor_job_from(ini_of("[anchors]\npreset = pedestrian\nlayers = a:2x3, b:1x1\n"));
  ASSERT_EQ(job.layers.size(), 2u);
  EXPECT_EQ(job.layers[0].name, "a");
  EXPECT_EQ(job.layers[0].rows, 2);
  EXPECT_EQ(job.layers[0].cols, 3);
  EXPECT_EQ(job.config.aspect_ratios.size(), 6u);
  EXPECT_EQ(job.config.boxes_per_cell(), 49u);

  const auto custom = anchor_job_from(ini_of(
      "[anchors]\npreset = none\naspect_ratios = 1\nrelative_heights = 0.5\nimage_width = 100\n"
      "image_height = 100\nlayers = l:1x1\n"));
  EXPECT_EQ(custom.config.boxes_per_cell(), 1u);
  EXPECT_THROW(anchor_job_from(ini_of("[anchors]\nlayers = broken\n")), ValidationError);
  EXPECT_THROW(anchor_job_from(ini_of("[anchors]\npreset = nope\n")), ValidationError);
}

TEST(Config, SynthSection) {
  const auto c = synth_config_from(
      ini_of("[synth]\nseed = 9\nnum_images = 3\nclassifier_reliabilities = 0.95, 0.5\n"));
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.num_images, 3);
  EXPECT_EQ(c.classifier_reliabilities, (std::vector<double>{0.95, 0.5}));
  EXPECT_EQ(c.cg_recall, SynthConfig{}.cg_recall);
}

TEST(Config, PipelineSection) {
  const auto cfg = pipeline_config_from(ini_of(
      "[inputs]\ndetections = d.jsonl\nopinions = a.jsonl, b.jsonl\n"
      "[fusion]\nmodel = weights\nweights = 1.11, 2.22\n"
      "[segfusion]\nmode = legacy\na_ss = 5\n"
      "[evaluation]\nsettings = Reasonable, All\niou_threshold = 0.6\nnum_images = 12\n"
      "[output]\ndirectory = o\n"));
  EXPECT_EQ(cfg.opinions.size(), 2u);
  EXPECT_EQ(cfg.fusion, FusionKind::Weights);
  EXPECT_EQ(cfg.weights.w, (std::vector<double>{1.11, 2.22}));
  EXPECT_EQ(cfg.segfusion, SegFusionMode::Legacy);
  EXPECT_EQ(cfg.legacy.a_ss, 5.0);
  EXPECT_EQ(cfg.settings, (std::vector<std::string>{"Reasonable", "All"}));
  EXPECT_EQ(cfg.iou_threshold, 0.6);
  EXPECT_EQ(cfg.num_images, 12u);
  EXPECT_EQ(cfg.output_dir, "o");
  EXPECT_THROW(pipeline_config_from(ini_of("[fusion]\nmodel = magic\n")), ValidationError);
  EXPECT_THROW(parse_segfusion_mode("sometimes"), ValidationError);
}
