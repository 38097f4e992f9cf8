// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "fdnn/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace fdnn {

bool is_valid(const BoundingBox &b) {
  return std::isfinite(b.x) && std::isfinite(b.y) && std::isfinite(b.w) && std::isfinite(b.h) &&
         b.w > 0.0 && b.h > 0.0;
}

double area(const BoundingBox &b) { return b.w * b.h; }

double intersection_area(const BoundingBox &a, const BoundingBox &b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0)
    return 0.0;
  return iw * ih;
}

double jaccard(const BoundingBox &a, const BoundingBox &b) {
  const double inter = intersection_area(a, b);
  if (inter == 0.0)
    return 0.0;
  // union >= max(area) holds exactly; rounding in the subtraction must not break it
  const double uni = std::max({area(a) + area(b) - inter, area(a), area(b)});
  return inter / uni;
}

double overlap_over_detection(const BoundingBox &det, const BoundingBox &gt) {
  const double inter = intersection_area(det, gt);
  if (inter == 0.0)
    return 0.0;
  return inter / area(det);
}

std::span<const std::size_t> ImageGroups::find(const std::string &image_id) const {
  auto it = slot.find(image_id);
  if (it == slot.end())
    return {};
  return members[it->second];
}

namespace {

template <typename Record> ImageGroups group_records(std::span<const Record> records) {
  ImageGroups groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = groups.slot.try_emplace(records[i].image_id, groups.image_ids.size());
    if (inserted) {
      groups.image_ids.push_back(records[i].image_id);
      groups.members.emplace_back();
    }
    groups.members[it->second].push_back(i);
  }
  return groups;
}

} // namespace

ImageGroups group_by_image(std::span<const Detection> dets) { return group_records(dets); }
ImageGroups group_by_image(std::span<const GroundTruth> gts) { return group_records(gts); }

} // namespace fdnn
