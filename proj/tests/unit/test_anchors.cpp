// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "fdnn/anchors.hpp"
#include "fdnn/error.hpp"
#include "fdnn/rng.hpp"

#include <gtest/gtest.h>

using namespace fdnn;

namespace {

AnchorConfig square_config(std::vector<double> ratios, std::vector<double> heights) {
  AnchorConfig c;
  c.aspect_ratios = std::move(ratios);
  c.relative_heights = std::move(heights);
  c.image_width = 100;
  c.image_height = 100;
  return c;
}

} // namespace

TEST(Anchors, EmptyLayersGiveNoBoxes) {
  EXPECT_TRUE(generate_default_boxes({}, pedestrian_anchor_preset()).empty());
}

TEST(Anchors, SingleCell) {
  const std::vector<FeatureMapSpec> layers{{"l", 1, 1}};
  const auto boxes = generate_default_boxes(layers, square_config({1.0}, {0.5}));
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_EQ(boxes[0], (BoundingBox{25, 25, 50, 50}));
}

TEST(Anchors, TwoByTwoGrid) {
  const std::vector<FeatureMapSpec> layers{{"l", 2, 2}};
  const auto boxes = generate_default_boxes(layers, square_config({0.5}, {0.2}));
  ASSERT_EQ(boxes.size(), 4u);
  const double centers[4][2] = {{25, 25}, {75, 25}, {25, 75}, {75, 75}};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(boxes[i].w, 10.0);
    EXPECT_DOUBLE_EQ(boxes[i].h, 20.0);
    EXPECT_DOUBLE_EQ(boxes[i].center_x(), centers[i][0]);
    EXPECT_DOUBLE_EQ(boxes[i].center_y(), centers[i][1]);
  }
}

TEST(Anchors, CountMatchesCrossProductPlusExtra) {
  const auto cfg = pedestrian_anchor_preset();
  EXPECT_EQ(cfg.boxes_per_cell(), 6u * 7u + 7u);
  const std::vector<FeatureMapSpec> layers{{"a", 3, 4}, {"b", 2, 2}, {"c", 1, 1}};
  EXPECT_EQ(generate_default_boxes(layers, cfg).size(), (12u + 4u + 1u) * 49u);
}

TEST(Anchors, UnclippedByDefaultClippedOnRequest) {
  const std::vector<FeatureMapSpec> layers{{"l", 1, 1}};
  auto cfg = square_config({3.0}, {0.9});
  const auto wide = generate_default_boxes(layers, cfg);
  EXPECT_LT(wide[0].x, 0.0);
  cfg.clip = true;
  const auto clipped = generate_default_boxes(layers, cfg);
  EXPECT_DOUBLE_EQ(clipped[0].x, 0.0);
  EXPECT_DOUBLE_EQ(clipped[0].right(), 100.0);
}

TEST(Anchors, InvalidConfigRejected) {
  EXPECT_THROW(square_config({0.0}, {0.5}).validate(), ValidationError);
  EXPECT_THROW(square_config({1.0}, {1.5}).validate(), ValidationError);
  EXPECT_THROW(square_config({1.0}, {0.0}).validate(), ValidationError);
  const std::vector<FeatureMapSpec> bad{{"l", 0, 3}};
  EXPECT_THROW(generate_default_boxes(bad, square_config({1.0}, {0.5})), ValidationError);
}

TEST(AnchorMatch, Examples) {
  const std::vector<BoundingBox> gts{{0, 0, 10, 15}, {100, 100, 20, 20}};
  const std::vector<BoundingBox> anchors{{100, 100, 20, 20}, {300, 300, 5, 5}, {0, 0, 10, 10}};
  const auto m = match_anchors(anchors, gts);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_TRUE(m[0].positive);
  EXPECT_EQ(m[0].matched_gt, 1u);
  EXPECT_FALSE(m[1].positive);
  EXPECT_FALSE(m[1].matched_gt.has_value());
  EXPECT_TRUE(m[2].positive);
  EXPECT_DOUBLE_EQ(m[2].best_iou, 2.0 / 3.0);
}

TEST(AnchorMatch, StrictThresholdAndLowestIndexTie) {
  // IoU exactly 0.5 is not positive
  const std::vector<BoundingBox> gts{{0, 0, 10, 10}, {0, 0, 10, 10}};
  const std::vector<BoundingBox> anchors{{0, 0, 10, 5}, {0, 0, 10, 10}};
  const auto m = match_anchors(anchors, gts);
  EXPECT_FALSE(m[0].positive);
  EXPECT_TRUE(m[1].positive);
  EXPECT_EQ(m[1].matched_gt, 0u);
}

TEST(AnchorMatch, ThresholdDomain) {
  const std::vector<BoundingBox> none;
  EXPECT_THROW(match_anchors(none, none, 0.0), ValidationError);
  EXPECT_THROW(match_anchors(none, none, 1.0), ValidationError);
}

TEST(AnchorMatch, PositivesExceedThresholdWithTheirGt) {
  Xorshift64Star rng(11);
  const std::vector<FeatureMapSpec> layers{{"a", 6, 8}, {"b", 3, 4}};
  const auto anchors = generate_default_boxes(layers, pedestrian_anchor_preset());
  std::vector<BoundingBox> gts;
  for (int i = 0; i < 6; ++i) {
    const double h = rng.uniform(40, 300);
    gts.push_back({rng.uniform(0, 600), rng.uniform(0, 400), 0.41 * h, h});
  }
  std::size_t positives = 0;
  for (const auto &m : match_anchors(anchors, gts, 0.5)) {
    if (!m.positive)
      continue;
    ++positives;
    ASSERT_TRUE(m.matched_gt);
    EXPECT_GT(jaccard(anchors[m.anchor_index], gts[*m.matched_gt]), 0.5);
  }
  EXPECT_GT(positives, 0u);
}
