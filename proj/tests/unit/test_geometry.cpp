// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "fdnn/geometry.hpp"
#include "fdnn/rng.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace fdnn;

TEST(Geometry, Area) {
  EXPECT_DOUBLE_EQ(area({0, 0, 10, 10}), 100.0);
  EXPECT_DOUBLE_EQ(area({5, 5, 1, 1}), 1.0);
  // sub-pixel box: count quarter-pixel cells
  EXPECT_DOUBLE_EQ(oracle::raster_area({0, 0, 2.5, 4}, 4), 10.0);
  EXPECT_DOUBLE_EQ(area({0, 0, 2.5, 4}), 10.0);
}

TEST(Geometry, IntersectionArea) {
  EXPECT_DOUBLE_EQ(intersection_area({0, 0, 10, 10}, {0, 0, 10, 10}), 100.0);
  EXPECT_DOUBLE_EQ(intersection_area({0, 0, 10, 10}, {10, 10, 5, 5}), 0.0);
  EXPECT_DOUBLE_EQ(oracle::raster_intersection({0, 0, 10, 10}, {5, 0, 10, 10}), 50.0);
  EXPECT_DOUBLE_EQ(intersection_area({0, 0, 10, 10}, {5, 0, 10, 10}), 50.0);
}

TEST(Geometry, Jaccard) {
  const BoundingBox a{3, 4, 7, 9};
  EXPECT_DOUBLE_EQ(jaccard(a, a), 1.0);
  EXPECT_DOUBLE_EQ(jaccard({0, 0, 10, 10}, {20, 20, 5, 5}), 0.0);
  EXPECT_DOUBLE_EQ(oracle::raster_jaccard({0, 0, 10, 10}, {5, 0, 10, 10}), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(jaccard({0, 0, 10, 10}, {5, 0, 10, 10}), 1.0 / 3.0);
}

TEST(Geometry, OverlapOverDetection) {
  const BoundingBox d{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(overlap_over_detection(d, d), 1.0);
  EXPECT_DOUBLE_EQ(overlap_over_detection({0, 0, 10, 10}, {50, 50, 5, 5}), 0.0);
  const BoundingBox det{0, 0, 10, 10}, gt{0, 0, 5, 10};
  EXPECT_DOUBLE_EQ(oracle::raster_intersection(det, gt) / oracle::raster_area(det), 0.5);
  EXPECT_DOUBLE_EQ(overlap_over_detection(det, gt), 0.5);
  // asymmetric
  EXPECT_DOUBLE_EQ(overlap_over_detection(gt, det), 1.0);
}

TEST(Geometry, TouchingEdgesDoNotOverlap) {
  EXPECT_DOUBLE_EQ(intersection_area({0, 0, 10, 10}, {10, 0, 10, 10}), 0.0);
  EXPECT_DOUBLE_EQ(jaccard({0, 0, 10, 10}, {0, 10, 10, 10}), 0.0);
}

TEST(Geometry, Validity) {
  EXPECT_TRUE(is_valid({0, 0, 1, 1}));
  EXPECT_FALSE(is_valid({0, 0, 0, 1}));
  EXPECT_FALSE(is_valid({0, 0, 1, -1}));
  EXPECT_FALSE(is_valid({NAN, 0, 1, 1}));
  EXPECT_FALSE(is_valid({0, 0, INFINITY, 1}));
}

class GeometryProperty : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(GeometryProperty, RasterOracleOnIntegerBoxes) {
  Xorshift64Star rng(GetParam());
  for (int i = 0; i < 200; ++i) {
    auto box = [&] {
      return BoundingBox{static_cast<double>(rng.uniform_int(-5, 20)),
                         static_cast<double>(rng.uniform_int(-5, 20)),
                         static_cast<double>(rng.uniform_int(1, 15)),
                         static_cast<double>(rng.uniform_int(1, 15))};
    };
    const BoundingBox a = box(), b = box();
    EXPECT_NEAR(area(a), oracle::raster_area(a), 1e-9);
    EXPECT_NEAR(intersection_area(a, b), oracle::raster_intersection(a, b), 1e-9);
    EXPECT_NEAR(jaccard(a, b), oracle::raster_jaccard(a, b), 1e-9);
    EXPECT_NEAR(overlap_over_detection(a, b),
                oracle::raster_intersection(a, b) / oracle::raster_area(a), 1e-9);
  }
}

TEST_P(GeometryProperty, SymmetryAndBounds) {
  Xorshift64Star rng(GetParam() * 7919);
  for (int i = 0; i < 2000; ++i) {
    auto box = [&] {
      return BoundingBox{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(0.01, 60),
                         rng.uniform(0.01, 60)};
    };
    const BoundingBox a = box(), b = box();
    const double j = jaccard(a, b);
    EXPECT_EQ(j, jaccard(b, a));
    EXPECT_GE(j, 0.0);
    EXPECT_LE(j, 1.0);
    EXPECT_LE(j, std::min(overlap_over_detection(a, b), overlap_over_detection(b, a)));
    EXPECT_EQ(intersection_area(a, b), intersection_area(b, a));
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, GeometryProperty, ::testing::Values(1u, 2u, 3u));

TEST(Geometry, GroupByImageKeepsFirstSeenOrder) {
  std::vector<Detection> dets(4);
  dets[0].image_id = "b";
  dets[1].image_id = "a";
  dets[2].image_id = "b";
  dets[3].image_id = "c";
  const auto g = group_by_image(std::span<const Detection>(dets));
  ASSERT_EQ(g.image_ids, (std::vector<std::string>{"b", "a", "c"}));
  EXPECT_EQ(std::vector<std::size_t>(g.find("b").begin(), g.find("b").end()),
            (std::vector<std::size_t>{0, 2}));
  EXPECT_TRUE(g.find("zzz").empty());
}
