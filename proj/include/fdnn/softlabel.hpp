// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#pragma once

#include "fdnn/geometry.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace fdnn {

/// Overlap band over which labels interpolate linearly between background
/// (ratio <= th_a) and pedestrian (ratio >= th_b).
struct LabelThresholds {
  double th_a = 0.4;
  double th_b = 0.6;

  /// Requires 0 <= th_a < th_b <= 1. Throws ValidationError.
  void validate() const;
};

/// Two-class label; components are in [0,1] and sum to exactly 1.
struct SoftLabel {
  double ped = 0.0;
  double bg = 1.0;

  /// (ped, bg), the class order used by cross_entropy().
  std::array<double, 2> as_array() const { return {ped, bg}; }

  bool operator==(const SoftLabel &) const = default;
};

/// label_ped as a function of the overlap ratio r.
double soft_label_value(double r, const LabelThresholds &thr);

SoftLabel soft_label_from_ratio(double r, const LabelThresholds &thr);

struct OverlapHit {
  double ratio = 0.0;                // max over gts of overlap_over_detection
  std::optional<std::size_t> gt;     // index of the best gt, lowest on ties
};

OverlapHit best_overlap(const BoundingBox &det, std::span<const BoundingBox> gts);

SoftLabel assign_soft_label(const Detection &det, std::span<const BoundingBox> gts,
                            const LabelThresholds &thr);

/// Multi-class variant: index 0 is background, index c is class c. The
/// best-overlapping gt's class receives the soft value, background the rest.
std::vector<double> assign_multiclass_label(const Detection &det, std::span<const GroundTruth> gts,
                                            int num_classes, const LabelThresholds &thr);

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

/// Probabilities below this are clamped before taking the log.
inline constexpr double kProbabilityClamp = 1e-12;

/// -sum_i label_i * log(probs_i). Throws ValidationError on size mismatch.
double cross_entropy(std::span<const double> label, std::span<const double> probs);

/// d/dz of cross_entropy(label, softmax(z)) = softmax(z) - label.
std::vector<double> cross_entropy_gradient(std::span<const double> label,
                                           std::span<const double> logits);

struct LabeledCandidate {
  Detection detection;
  SoftLabel label;
  std::optional<std::size_t> matched_gt; // index into the gts passed in
  bool injected_gt = false;

  bool operator==(const LabeledCandidate &) const = default;
};

/// Candidates with score > min_score and height > min_height, each with its
/// soft label against the gts of its image, followed by every gt injected as a
/// pedestrian-labelled candidate (id "gt:<index>"). Pass inject_gt = false to
/// skip the injection.
std::vector<LabeledCandidate> build_training_set(std::span<const Detection> candidates,
                                                 std::span<const GroundTruth> gts,
                                                 const LabelThresholds &thr,
                                                 double min_score = 0.01,
                                                 double min_height = 40.0,
                                                 bool inject_gt = true);

} // namespace fdnn
