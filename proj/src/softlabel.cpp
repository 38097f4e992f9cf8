// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "fdnn/softlabel.hpp"

#include "fdnn/error.hpp"
#include "fdnn/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace fdnn {

void LabelThresholds::validate() const {
  if (!(th_a >= 0.0 && th_a < th_b && th_b <= 1.0))
    throw ValidationError("label thresholds require 0 <= th_a < th_b <= 1");
}

double soft_label_value(double r, const LabelThresholds &thr) {
  if (r > thr.th_b)
    return 1.0;
  if (r < thr.th_a)
    return 0.0;
  // closed band; the endpoints give exactly 0 and 1
  return (r - thr.th_a) / (thr.th_b - thr.th_a);
}

SoftLabel soft_label_from_ratio(double r, const LabelThresholds &thr) {
  const double ped = soft_label_value(r, thr);
  return {ped, 1.0 - ped};
}

OverlapHit best_overlap(const BoundingBox &det, std::span<const BoundingBox> gts) {
  OverlapHit hit;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    const double r = overlap_over_detection(det, gts[g]);
    if (r > hit.ratio) {
      hit.ratio = r;
      hit.gt = g;
    }
  }
  return hit;
}

SoftLabel assign_soft_label(const Detection &det, std::span<const BoundingBox> gts,
                            const LabelThresholds &thr) {
  thr.validate();
  return soft_label_from_ratio(best_overlap(det.box, gts).ratio, thr);
}

std::vector<double> assign_multiclass_label(const Detection &det, std::span<const GroundTruth> gts,
                                            int num_classes, const LabelThresholds &thr) {
  thr.validate();
  if (num_classes < 1)
    throw ValidationError("num_classes must be at least 1");
  std::vector<double> label(static_cast<std::size_t>(num_classes) + 1, 0.0);
  double best = 0.0;
  int best_class = 0;
  for (const auto &gt : gts) {
    const double r = overlap_over_detection(det.box, gt.box);
    if (r > best) {
      best = r;
      best_class = gt.class_id;
    }
  }
  if (best_class < 0 || best_class > num_classes)
    throw ValidationError("ground-truth class id out of range");
  const double value = best_class == 0 ? 0.0 : soft_label_value(best, thr);
  label[static_cast<std::size_t>(best_class)] = value;
  label[0] = 1.0 - value;
  return label;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty())
    return out;
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    sum += out[i];
  }
  for (double &v : out)
    v /= sum;
  return out;
}

double cross_entropy(std::span<const double> label, std::span<const double> probs) {
  if (label.size() != probs.size())
    throw ValidationError("cross entropy: label has " + std::to_string(label.size()) +
                          " classes, probabilities have " + std::to_string(probs.size()));
  double loss = 0.0;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (label[i] == 0.0)
      continue;
    loss -= label[i] * std::log(std::clamp(probs[i], kProbabilityClamp, 1.0));
  }
  return loss;
}

std::vector<double> cross_entropy_gradient(std::span<const double> label,
                                           std::span<const double> logits) {
  if (label.size() != logits.size())
    throw ValidationError("cross entropy gradient: label/logit size mismatch");
  auto grad = softmax(logits);
  for (std::size_t i = 0; i < grad.size(); ++i)
    grad[i] -= label[i];
  return grad;
}

std::vector<LabeledCandidate> build_training_set(std::span<const Detection> candidates,
                                                 std::span<const GroundTruth> gts,
                                                 const LabelThresholds &thr, double min_score,
                                                 double min_height, bool inject_gt) {
  thr.validate();
  std::vector<Detection> kept;
  for (const auto &c : candidates)
    if (c.score > min_score && c.box.h > min_height)
      kept.push_back(c);

  const ImageGroups gt_groups = group_by_image(gts);
  std::vector<OverlapHit> hits(kept.size());
  kernels::omp::best_overlaps(kept, gts, gt_groups, hits);

  std::vector<LabeledCandidate> out;
  out.reserve(kept.size() + (inject_gt ? gts.size() : 0));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    LabeledCandidate lc;
    lc.detection = std::move(kept[i]);
    lc.label = soft_label_from_ratio(hits[i].ratio, thr);
    lc.matched_gt = hits[i].gt;
    out.push_back(std::move(lc));
  }
  if (inject_gt) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      LabeledCandidate lc;
      lc.detection.box = gts[g].box;
      lc.detection.score = 1.0;
      lc.detection.id = "gt:" + std::to_string(g);
      lc.detection.source = "ground_truth";
      lc.detection.class_id = gts[g].class_id;
      lc.detection.image_id = gts[g].image_id;
      lc.label = {1.0, 0.0};
      lc.matched_gt = g;
      lc.injected_gt = true;
      out.push_back(std::move(lc));
    }
  }
  return out;
}

} // namespace fdnn
