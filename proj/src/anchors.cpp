// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "fdnn/anchors.hpp"

#include "fdnn/error.hpp"

#include <algorithm>
#include <cmath>

namespace fdnn {

namespace {

void check_heights(const std::vector<double> &heights, const char *what) {
  for (double h : heights)
    if (!(h > 0.0 && h <= 1.0))
      throw ValidationError(std::string(what) + " must lie in (0, 1]");
}

} // namespace

void AnchorConfig::validate() const {
  for (double r : aspect_ratios)
    if (!(r > 0.0 && std::isfinite(r)))
      throw ValidationError("aspect ratios must be positive");
  check_heights(relative_heights, "relative heights");
  check_heights(extra_heights, "extra relative heights");
  if (extra_ratio && !(*extra_ratio > 0.0 && std::isfinite(*extra_ratio)))
    throw ValidationError("extra aspect ratio must be positive");
  if (!extra_heights.empty() && !extra_ratio)
    throw ValidationError("extra relative heights given without an extra aspect ratio");
  if (!(image_width > 0.0 && image_height > 0.0))
    throw ValidationError("image dimensions must be positive");
}

std::size_t AnchorConfig::boxes_per_cell() const {
  return aspect_ratios.size() * relative_heights.size() + (extra_ratio ? extra_heights.size() : 0);
}

AnchorConfig pedestrian_anchor_preset(double image_width, double image_height) {
  AnchorConfig cfg;
  cfg.aspect_ratios = {0.1, 0.2, 0.41, 0.8, 1.6, 3.0};
  cfg.relative_heights = {0.05, 0.1, 0.24, 0.38, 0.52, 0.66, 0.80};
  cfg.extra_ratio = 0.41;
  cfg.extra_heights = {0.1, 0.24, 0.38, 0.52, 0.66, 0.80, 0.94};
  cfg.image_width = image_width;
  cfg.image_height = image_height;
  return cfg;
}

std::vector<BoundingBox> generate_default_boxes(std::span<const FeatureMapSpec> layers,
                                                const AnchorConfig &cfg) {
  cfg.validate();
  std::size_t total = 0;
  for (const auto &layer : layers) {
    if (layer.rows < 1 || layer.cols < 1)
      throw ValidationError("feature map '" + layer.name + "' must have positive rows and cols");
    total += static_cast<std::size_t>(layer.rows) * static_cast<std::size_t>(layer.cols) *
             cfg.boxes_per_cell();
  }

  std::vector<BoundingBox> out;
  out.reserve(total);
  auto emit = [&](double cx, double cy, double ratio, double rel_height) {
    const double h = rel_height * cfg.image_height;
    const double w = ratio * h;
    BoundingBox b{cx - 0.5 * w, cy - 0.5 * h, w, h};
    if (cfg.clip) {
      const double x0 = std::max(b.x, 0.0), y0 = std::max(b.y, 0.0);
      const double x1 = std::min(b.right(), cfg.image_width);
      const double y1 = std::min(b.bottom(), cfg.image_height);
      b = {x0, y0, x1 - x0, y1 - y0};
    }
    out.push_back(b);
  };

  for (const auto &layer : layers) {
    const double step_x = cfg.image_width / layer.cols;
    const double step_y = cfg.image_height / layer.rows;
    for (int r = 0; r < layer.rows; ++r) {
      const double cy = (r + 0.5) * step_y;
      for (int c = 0; c < layer.cols; ++c) {
        const double cx = (c + 0.5) * step_x;
        for (double ratio : cfg.aspect_ratios)
          for (double rh : cfg.relative_heights)
            emit(cx, cy, ratio, rh);
        if (cfg.extra_ratio)
          for (double rh : cfg.extra_heights)
            emit(cx, cy, *cfg.extra_ratio, rh);
      }
    }
  }
  return out;
}

std::vector<AnchorMatch> match_anchors(std::span<const BoundingBox> anchors,
                                       std::span<const BoundingBox> gts, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw ValidationError("match threshold must lie in (0, 1)");
  std::vector<AnchorMatch> out(anchors.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    AnchorMatch &m = out[i];
    m.anchor_index = i;
    std::size_t best = 0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double iou = jaccard(anchors[i], gts[g]);
      if (iou > m.best_iou) {
        m.best_iou = iou;
        best = g;
      }
    }
    m.positive = m.best_iou > threshold;
    if (m.positive)
      m.matched_gt = best;
  }
  return out;
}

} // namespace fdnn
