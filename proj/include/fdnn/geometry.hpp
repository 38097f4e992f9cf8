// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace fdnn {

/// Axis-aligned box in pixel coordinates: (x, y) is the top-left corner,
/// y grows downward. Continuous geometry; there is no +1 pixel convention.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double center_x() const { return x + 0.5 * w; }
  double center_y() const { return y + 0.5 * h; }

  bool operator==(const BoundingBox &) const = default;
};

/// Positive finite width/height and finite corner.
bool is_valid(const BoundingBox &b);

struct Detection {
  BoundingBox box;
  double score = 0.0;
  std::string id;       // candidate id, unique within a detections file
  std::string source;   // producing network, e.g. "cg"
  int class_id = 1;
  std::string image_id;

  bool operator==(const Detection &) const = default;
};

struct GroundTruth {
  BoundingBox box;
  std::string image_id;
  double occlusion = 0.0;  // occluded fraction in [0,1]
  double truncation = 0.0; // truncated fraction in [0,1]; only KITTI presets read it
  bool ignore = false;
  int class_id = 1;

  bool operator==(const GroundTruth &) const = default;
};

double area(const BoundingBox &b);
double intersection_area(const BoundingBox &a, const BoundingBox &b);

/// Intersection over union.
double jaccard(const BoundingBox &a, const BoundingBox &b);

/// Intersection over the detection's own area. Asymmetric.
double overlap_over_detection(const BoundingBox &det, const BoundingBox &gt);

/// Records grouped by image id, preserving first-appearance order of images
/// and input order within each image.
struct ImageGroups {
  std::vector<std::string> image_ids;
  std::vector<std::vector<std::size_t>> members;
  std::unordered_map<std::string, std::size_t> slot;

  /// Index list for an image, empty if the image has no records.
  std::span<const std::size_t> find(const std::string &image_id) const;
};

ImageGroups group_by_image(std::span<const Detection> dets);
ImageGroups group_by_image(std::span<const GroundTruth> gts);

} // namespace fdnn
