// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "kernels_detail.hpp"

namespace fdnn::kernels::serial {

namespace {

long as_long(std::size_t n) { return static_cast<long>(n); }

} // namespace

void best_overlaps(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                   const ImageGroups &gt_groups, std::span<OverlapHit> out) {
  for (long i = 0; i < as_long(dets.size()); ++i)
    out[i] = detail::best_overlap_one(dets[i], gts, gt_groups);
}

void soft_rejection_scores(std::span<const double> s_cg, const ProbMatrix &probs,
                           const SoftRejectionParams &params, std::span<double> out) {
  for (long i = 0; i < as_long(s_cg.size()); ++i)
    out[i] = fuse_soft_rejection(s_cg[i], probs.row(i), params);
}

void weighted_scores(std::span<const double> s_cg, const ProbMatrix &probs,
                     const FusionWeights &weights, double floor, std::span<double> out) {
  for (long i = 0; i < as_long(s_cg.size()); ++i)
    out[i] = detail::weighted_one(s_cg[i], probs.row(i), weights, floor);
}

void network_scores(std::span<const double> s_cg, const ProbMatrix &probs,
                    const FusionNetwork &net, double floor, std::span<double> out) {
  for (long i = 0; i < as_long(s_cg.size()); ++i)
    out[i] = s_cg[i] * net.forward(probs.row(i), floor).fused_factor;
}

void resample_crops(std::span<const BoundingBox> boxes, std::span<const SegMask *const> masks,
                    std::size_t rows, std::size_t cols, std::span<double> out) {
  for (long i = 0; i < as_long(boxes.size()); ++i)
    detail::resample_into(boxes[i], *masks[i], rows, cols, out.data() + i * rows * cols);
}

void seg_scores(std::span<const BoundingBox> boxes, std::span<const SegMask *const> masks,
                const Kernel &kernel, std::span<double> out) {
  for (long i = 0; i < as_long(boxes.size()); ++i)
    out[i] = seg_score(boxes[i], *masks[i], kernel);
}

void overlap_fractions(std::span<const BoundingBox> boxes, std::span<const SegMask *const> masks,
                       std::span<double> out) {
  for (long i = 0; i < as_long(boxes.size()); ++i)
    out[i] = mask_overlap_fraction(boxes[i], *masks[i]);
}

void match_images(std::span<const ImageTask> tasks, double iou_threshold,
                  std::span<ImageMatch> out) {
  for (long i = 0; i < as_long(tasks.size()); ++i)
    out[i] = match_detections(tasks[i].dets, tasks[i].gts, iou_threshold);
}

} // namespace fdnn::kernels::serial
