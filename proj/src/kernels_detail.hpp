// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#pragma once

// Per-element bodies shared by the serial and OpenMP kernel builds.

#include "fdnn/fusion_network.hpp"
#include "fdnn/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace fdnn::kernels::detail {

inline OverlapHit best_overlap_one(const Detection &det, std::span<const GroundTruth> gts,
                                   const ImageGroups &gt_groups) {
  OverlapHit hit;
  for (std::size_t g : gt_groups.find(det.image_id)) {
    const double r = overlap_over_detection(det.box, gts[g].box);
    if (r > hit.ratio) {
      hit.ratio = r;
      hit.gt = g;
    }
  }
  return hit;
}

inline double weighted_one(double s_cg, std::span<const double> probs, const FusionWeights &w,
                           double floor) {
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k)
    acc += w.w[k] * std::log(std::clamp(probs[k], floor, 1.0));
  return s_cg * std::exp(acc);
}

inline void resample_into(const BoundingBox &box, const SegMask &mask, std::size_t rows,
                          std::size_t cols, double *out) {
  const auto crop = resample_crop(box, mask, rows, cols);
  std::copy(crop.begin(), crop.end(), out);
}

} // namespace fdnn::kernels::detail
