// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#pragma once

#include "fdnn/fusion.hpp"
#include "fdnn/geometry.hpp"
#include "fdnn/rng.hpp"
#include "fdnn/segfusion.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fdnn {

/// Parameters of the synthetic corpus. All randomness flows from `seed`
/// through one Xorshift64Star stream in a fixed draw order.
struct SynthConfig {
  std::uint64_t seed = 1;
  int num_images = 100;
  int image_width = 640;
  int image_height = 480;

  int gts_min = 1; // per image, uniform in [gts_min, gts_max]
  int gts_max = 4;
  double gt_height_min = 50.0;
  double gt_height_max = 200.0;
  double gt_aspect = 0.41;
  double occluded_fraction = 0.2; // share of gts with occlusion ~ U(0, 0.8)

  double cg_recall = 0.95;
  double fp_rate = 3.0; // false boxes per image; fractional part is a Bernoulli draw
  double localization_noise = 3.0; // px stddev on x, y, w, h
  double cg_true_score_mean = 0.55;
  double cg_false_score_mean = 0.40;
  double cg_score_spread = 0.2;

  std::vector<double> classifier_reliabilities = {0.9, 0.8};
  double mask_fidelity = 0.95;
  bool emit_masks = true;

  /// Throws ValidationError.
  void validate() const;
};

struct SynthCorpus {
  std::vector<std::string> image_ids;
  std::vector<GroundTruth> gts;
  std::vector<Detection> cg_detections;
  std::vector<std::vector<ClassifierOpinion>> opinions; // [network][candidate], one prob each
  MaskStore masks;
};

/// Draw order per image: gts, then detections, then opinions (per detection,
/// per network), then the mask.
SynthCorpus generate(const SynthConfig &cfg);

/// A candidate is true when it overlaps some gt with IoU >= 0.5.
bool is_true_candidate(const BoundingBox &candidate, std::span<const BoundingBox> gts);

/// Simulated verification network. A Bernoulli(reliability) draw decides
/// whether the network is right; the confidence magnitude is
/// a = clamp(reliability + N(0, 0.1), 0.51, 1); a right answer puts a on
/// the true class, a wrong one puts 1 - a there. Thresholding at 0.5 is
/// therefore correct with probability exactly `reliability`.
double opinion_oracle(const Detection &candidate, std::span<const BoundingBox> gts,
                      double reliability, Xorshift64Star &rng);

} // namespace fdnn
