// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#pragma once

#include "fdnn/geometry.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fdnn {

/// One detector output layer: an m x n grid of anchor locations.
struct FeatureMapSpec {
  std::string name;
  int rows = 1;
  int cols = 1;
};

/// Default-box layout. Each grid cell receives one box per
/// (aspect_ratio, relative_height) pair, then one box per extra_heights entry
/// at extra_ratio. Height is relative to the image height; width = ratio * height.
struct AnchorConfig {
  std::vector<double> aspect_ratios;
  std::vector<double> relative_heights;
  std::optional<double> extra_ratio;
  std::vector<double> extra_heights;
  double image_width = 640.0;
  double image_height = 480.0;
  bool clip = false;

  /// Throws ValidationError.
  void validate() const;

  std::size_t boxes_per_cell() const;
};

/// The pedestrian layout: six ratios crossed with seven heights, plus an extra
/// set at the mean pedestrian aspect ratio 0.41.
AnchorConfig pedestrian_anchor_preset(double image_width = 640.0, double image_height = 480.0);

/// Boxes ordered by layer, row, column, then ratio-major over heights, then
/// extra heights.
std::vector<BoundingBox> generate_default_boxes(std::span<const FeatureMapSpec> layers,
                                                const AnchorConfig &cfg);

struct AnchorMatch {
  std::size_t anchor_index = 0;
  bool positive = false;
  std::optional<std::size_t> matched_gt; // set for positives only
  double best_iou = 0.0;
};

/// An anchor is positive iff its best Jaccard overlap over gts exceeds the
/// threshold. Ties go to the lowest gt index.
std::vector<AnchorMatch> match_anchors(std::span<const BoundingBox> anchors,
                                       std::span<const BoundingBox> gts, double threshold = 0.5);

} // namespace fdnn
