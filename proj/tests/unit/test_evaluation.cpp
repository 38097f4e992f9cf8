// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "fdnn/error.hpp"
#include "fdnn/evaluation.hpp"
#include "fdnn/rng.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace fdnn;

namespace {

GroundTruth gt(const std::string &image, BoundingBox b, double occ = 0.0, bool ignore = false) {
  GroundTruth g;
  g.image_id = image;
  g.box = b;
  g.occlusion = occ;
  g.ignore = ignore;
  return g;
}

Detection det(const std::string &image, BoundingBox b, double score) {
  Detection d;
  d.image_id = image;
  d.box = b;
  d.score = score;
  return d;
}

const EvalSetting &reasonable() { return setting_by_name("Reasonable"); }

// Largest number of true positives any one-to-one assignment could reach.
std::size_t exhaustive_max_tp(const std::vector<Detection> &dets, const std::vector<GroundTruth> &gts,
                              std::size_t d, std::vector<bool> &used) {
  if (d == dets.size())
    return 0;
  std::size_t best = exhaustive_max_tp(dets, gts, d + 1, used);
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (used[g] || gts[g].ignore || oracle::raster_iou_exact(dets[d].box, gts[g].box) < 0.5)
      continue;
    used[g] = true;
    best = std::max(best, 1 + exhaustive_max_tp(dets, gts, d + 1, used));
    used[g] = false;
  }
  return best;
}

} // namespace

TEST(Settings, ReasonableExamples) {
  const auto out = apply_setting(
      std::vector<GroundTruth>{gt("i", {0, 0, 20, 60}), gt("i", {0, 0, 20, 40}),
                               gt("i", {0, 0, 20, 60}, 0.5), gt("i", {0, 0, 20, 60}, 0.2),
                               gt("i", {0, 0, 20, 60}, 0.0, true)},
      reasonable());
  EXPECT_FALSE(out[0].ignore);
  EXPECT_TRUE(out[1].ignore);
  EXPECT_TRUE(out[2].ignore);
  EXPECT_FALSE(out[3].ignore);
  EXPECT_TRUE(out[4].ignore);
}

TEST(Settings, AllNamesResolveCaseInsensitively) {
  for (const char *name : {"reasonable", "ALL", "Far", "medium", "Near", "occ.none", "Occ.partial",
                           "Occ.heavy", "kitti.easy", "KITTI.moderate", "KITTI.hard"})
    EXPECT_NO_THROW(setting_by_name(name)) << name;
  EXPECT_THROW(setting_by_name("bogus"), ValidationError);
  EXPECT_EQ(standard_settings().size(), 11u);
}

TEST(Settings, ScaleAndOcclusionBuckets) {
  const auto &far = setting_by_name("Far");
  EXPECT_TRUE(far.admits(gt("i", {0, 0, 10, 20})));
  EXPECT_TRUE(far.admits(gt("i", {0, 0, 10, 29.9})));
  EXPECT_FALSE(far.admits(gt("i", {0, 0, 10, 30})));
  EXPECT_FALSE(far.admits(gt("i", {0, 0, 10, 25}, 0.1)));
  const auto &near = setting_by_name("Near");
  EXPECT_TRUE(near.admits(gt("i", {0, 0, 10, 80})));
  EXPECT_FALSE(near.admits(gt("i", {0, 0, 10, 79})));
  const auto &heavy = setting_by_name("Occ.heavy");
  EXPECT_FALSE(heavy.admits(gt("i", {0, 0, 20, 60}, 0.35)));
  EXPECT_TRUE(heavy.admits(gt("i", {0, 0, 20, 60}, 0.36)));
  EXPECT_TRUE(heavy.admits(gt("i", {0, 0, 20, 60}, 0.8)));
  EXPECT_FALSE(heavy.admits(gt("i", {0, 0, 20, 60}, 0.9)));
  const auto &partial = setting_by_name("Occ.partial");
  EXPECT_FALSE(partial.admits(gt("i", {0, 0, 20, 60}, 0.0)));
  EXPECT_TRUE(partial.admits(gt("i", {0, 0, 20, 60}, 0.35)));
  const auto &all = setting_by_name("All");
  EXPECT_TRUE(all.admits(gt("i", {0, 0, 20, 20}, 0.8)));
  EXPECT_FALSE(all.admits(gt("i", {0, 0, 20, 20}, 0.81)));
}

TEST(Settings, KittiTruncation) {
  auto g = gt("i", {0, 0, 20, 45});
  g.truncation = 0.2;
  EXPECT_FALSE(setting_by_name("KITTI.easy").admits(g));
  EXPECT_TRUE(setting_by_name("KITTI.moderate").admits(g));
  g.truncation = 0.1;
  EXPECT_TRUE(setting_by_name("KITTI.easy").admits(g));
  g.box.h = 39;
  EXPECT_FALSE(setting_by_name("KITTI.easy").admits(g));
}

TEST(Matching, Examples) {
  const std::vector<GroundTruth> gts{gt("i", {0, 0, 20, 50})};
  auto m = match_detections(std::vector<Detection>{det("i", {0, 0, 20, 50}, 0.9)}, gts);
  EXPECT_EQ(m.detections[0], DetVerdict::TruePositive);
  EXPECT_EQ(m.gts[0], GtStatus::Matched);

  m = match_detections(std::vector<Detection>{det("i", {100, 100, 20, 50}, 0.9)}, gts);
  EXPECT_EQ(m.detections[0], DetVerdict::FalsePositive);
  EXPECT_EQ(m.gts[0], GtStatus::Missed);
}

TEST(Matching, TwoDetectionsOneGtFollowScoreOrder) {
  const std::vector<GroundTruth> gts{gt("i", {0, 0, 20, 50})};
  const std::vector<Detection> dets{det("i", {1, 0, 20, 50}, 0.8), det("i", {0, 1, 20, 50}, 0.9)};
  const auto m = match_detections(dets, gts);
  EXPECT_EQ(m.detections[1], DetVerdict::TruePositive);
  EXPECT_EQ(m.detections[0], DetVerdict::FalsePositive);
  std::vector<bool> used(1, false);
  EXPECT_EQ(exhaustive_max_tp(dets, gts, 0, used), 1u);
}

TEST(Matching, IgnoredGtAbsorbsDetections) {
  const std::vector<GroundTruth> gts{gt("i", {0, 0, 20, 50}, 0.0, true)};
  const std::vector<Detection> dets{det("i", {0, 0, 20, 50}, 0.9), det("i", {0, 0, 20, 50}, 0.8)};
  const auto m = match_detections(dets, gts);
  EXPECT_EQ(m.detections[0], DetVerdict::Ignored);
  EXPECT_EQ(m.detections[1], DetVerdict::Ignored);
  EXPECT_EQ(m.gts[0], GtStatus::Ignored);
}

TEST(Matching, PrefersUnmatchedRealGtOverIgnored) {
  const std::vector<GroundTruth> gts{gt("i", {0, 0, 20, 50}, 0.0, true), gt("i", {2, 0, 20, 50})};
  const auto m = match_detections(std::vector<Detection>{det("i", {0, 0, 20, 50}, 0.9)}, gts);
  EXPECT_EQ(m.detections[0], DetVerdict::TruePositive);
  EXPECT_EQ(m.assigned_gt[0], 1u);
}

TEST(Matching, CountInvariants) {
  Xorshift64Star rng(31);
  for (int i = 0; i < 300; ++i) {
    auto inst = oracle::random_instance(rng, 1);
    const auto m = match_detections(inst.dets, inst.gts);
    std::size_t tp = 0, fp = 0, ign = 0, matched = 0, missed = 0, real = 0;
    for (auto v : m.detections)
      (v == DetVerdict::TruePositive ? tp : v == DetVerdict::FalsePositive ? fp : ign)++;
    for (std::size_t g = 0; g < inst.gts.size(); ++g) {
      real += inst.gts[g].ignore ? 0 : 1;
      if (m.gts[g] == GtStatus::Matched)
        ++matched;
      if (m.gts[g] == GtStatus::Missed)
        ++missed;
    }
    EXPECT_EQ(tp + fp + ign, inst.dets.size());
    EXPECT_EQ(matched, tp);
    EXPECT_EQ(matched + missed, real);
    std::vector<bool> used(inst.gts.size(), false);
    EXPECT_LE(tp, exhaustive_max_tp(inst.dets, inst.gts, 0, used));
  }
}

TEST(Curve, NoDetections) {
  const std::vector<GroundTruth> gts{gt("i", {0, 0, 20, 60})};
  const auto c = curve({}, gts, reasonable());
  ASSERT_EQ(c.points.size(), 1u);
  EXPECT_EQ(c.points[0].fppi, 0.0);
  EXPECT_EQ(c.points[0].miss_rate, 1.0);
  EXPECT_DOUBLE_EQ(log_average_miss_rate(c), 1.0);
}

TEST(Curve, PerfectDetector) {
  const std::vector<GroundTruth> gts{gt("a", {0, 0, 20, 60}), gt("b", {5, 5, 30, 70})};
  const std::vector<Detection> dets{det("a", {0, 0, 20, 60}, 0.9), det("b", {5, 5, 30, 70}, 0.8)};
  const auto c = curve(dets, gts, reasonable());
  EXPECT_EQ(c.points.back().fppi, 0.0);
  EXPECT_EQ(c.points.back().miss_rate, 0.0);
  EXPECT_NEAR(log_average_miss_rate(c), kMissRateFloor, 1e-18);
}

TEST(Curve, MixedCaseMatchesBruteForce) {
  const std::vector<GroundTruth> gts{gt("a", {0, 0, 20, 60}), gt("a", {100, 0, 20, 60}),
                                     gt("b", {0, 0, 25, 70})};
  const std::vector<Detection> dets{det("a", {1, 1, 20, 60}, 0.9), det("a", {300, 0, 20, 60}, 0.7),
                                    det("b", {0, 2, 25, 70}, 0.6), det("b", {60, 0, 20, 60}, 0.2)};
  const auto c = curve(dets, gts, reasonable(), 0.5, 2);
  const auto o = oracle::brute_force_curve(dets, gts, reasonable(), 0.5, 2);
  ASSERT_EQ(c.points.size(), o.size());
  for (std::size_t i = 0; i < o.size(); ++i) {
    EXPECT_EQ(c.points[i].fppi, o[i].fppi);
    EXPECT_EQ(c.points[i].miss_rate, o[i].miss);
    EXPECT_EQ(c.points[i].threshold, o[i].threshold);
  }
  // 0.9 TP, 0.7 FP, 0.6 TP, 0.2 FP
  EXPECT_DOUBLE_EQ(c.points[3].fppi, 1.0);
  EXPECT_DOUBLE_EQ(c.points[3].miss_rate, 1.0 / 3.0);
}

TEST(Curve, ZeroEvaluatedGtsIsAnError) {
  const std::vector<GroundTruth> small{gt("a", {0, 0, 5, 10})};
  EXPECT_THROW(curve({}, small, reasonable()), ValidationError);
  EXPECT_EQ(evaluated_count(small, reasonable()), 0u);
}

TEST(Curve, MonotoneAndOracleOnRandomInstances) {
  Xorshift64Star rng(1234);
  const auto &all = setting_by_name("All");
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    const auto inst = oracle::random_instance(rng);
    if (evaluated_count(inst.gts, all) == 0)
      continue;
    ++checked;
    const auto c = curve(inst.dets, inst.gts, all, 0.5, inst.num_images);
    const auto o = oracle::brute_force_curve(inst.dets, inst.gts, all, 0.5, inst.num_images);
    ASSERT_EQ(c.points.size(), o.size());
    for (std::size_t p = 0; p < o.size(); ++p) {
      EXPECT_EQ(c.points[p].fppi, o[p].fppi);
      EXPECT_EQ(c.points[p].miss_rate, o[p].miss);
      if (p > 0) {
        EXPECT_GE(c.points[p].fppi, c.points[p - 1].fppi);
        EXPECT_LE(c.points[p].miss_rate, c.points[p - 1].miss_rate);
        EXPECT_LT(c.points[p].threshold, c.points[p - 1].threshold);
      }
    }
    EXPECT_EQ(oracle::round9(log_average_miss_rate(c)), oracle::round9(oracle::brute_force_lamr(o)));
  }
  EXPECT_GT(checked, 200);
}

TEST(Lamr, GeometricMeanExample) {
  // construct a curve whose nine samples are 0.1 five times and 0.2 four times
  EvalCurve c;
  c.num_images = 1;
  c.evaluated_gts = 10;
  const auto refs = reference_fppi();
  c.points.push_back({refs[0], 0.2, 0.9});
  c.points.push_back({refs[4], 0.1, 0.5});
  for (int k = 0; k < 9; ++k)
    EXPECT_EQ(miss_rate_at(c, refs[static_cast<std::size_t>(k)]), k < 4 ? 0.2 : 0.1);
  EXPECT_NEAR(log_average_miss_rate(c), std::exp((5 * std::log(0.1) + 4 * std::log(0.2)) / 9), 1e-15);
  EXPECT_NEAR(log_average_miss_rate(c), 0.13608, 5e-6);
}

TEST(Lamr, ReferencePoints) {
  const auto refs = reference_fppi();
  EXPECT_DOUBLE_EQ(refs.front(), 0.01);
  EXPECT_DOUBLE_EQ(refs.back(), 1.0);
  for (std::size_t k = 1; k < refs.size(); ++k)
    EXPECT_NEAR(refs[k] / refs[k - 1], std::pow(10.0, 0.25), 1e-12);
}

TEST(Lamr, InvariantToMonotoneScoreTransform) {
  Xorshift64Star rng(55);
  const auto &all = setting_by_name("All");
  for (int i = 0; i < 100; ++i) {
    auto inst = oracle::random_instance(rng);
    if (evaluated_count(inst.gts, all) == 0)
      continue;
    auto warped = inst.dets;
    for (auto &d : warped)
      d.score = std::pow(d.score, 3.0) * 0.5 + 0.1;
    EXPECT_EQ(log_average_miss_rate(curve(inst.dets, inst.gts, all, 0.5, inst.num_images)),
              log_average_miss_rate(curve(warped, inst.gts, all, 0.5, inst.num_images)));
  }
}

TEST(Ablation, TableShape) {
  const std::vector<GroundTruth> gts{gt("a", {0, 0, 20, 60}), gt("b", {0, 0, 25, 90})};
  const std::vector<Detection> dets{det("a", {1, 0, 20, 60}, 0.9), det("b", {70, 0, 25, 90}, 0.8)};
  const std::vector<AblationVariant> one{{"CG", dets}};
  const std::vector<EvalSetting> settings{reasonable()};
  const auto t = ablation_report(one, gts, settings);
  ASSERT_EQ(t.lamr.size(), 1u);
  EXPECT_EQ(t.lamr[0][0], log_average_miss_rate(curve(dets, gts, reasonable())));

  const std::vector<AblationVariant> twins{{"x", dets}, {"y", dets}};
  const std::vector<EvalSetting> two{reasonable(), setting_by_name("Far")};
  const auto u = ablation_report(twins, gts, two);
  EXPECT_EQ(u.lamr[0][0], u.lamr[1][0]);
  EXPECT_TRUE(std::isnan(u.lamr[0][1]));
  EXPECT_THROW(ablation_report({}, gts, settings), ValidationError);
}
