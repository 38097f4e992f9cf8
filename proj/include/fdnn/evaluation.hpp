// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#pragma once

#include "fdnn/geometry.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fdnn {

/// Occlusion bucket: contains v when lo < v <= hi, or v == lo if lo_inclusive.
struct OcclusionRange {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_inclusive = true;

  bool contains(double v) const { return (v > lo || (lo_inclusive && v == lo)) && v <= hi; }
};

inline constexpr OcclusionRange kOccNone{0.0, 0.0, true};
inline constexpr OcclusionRange kOccPartial{0.0, 0.35, false};
inline constexpr OcclusionRange kOccHeavy{0.35, 0.8, false};

/// Which ground truths count. Anything outside is marked ignore.
struct EvalSetting {
  std::string name;
  double min_height = 0.0;               // inclusive
  std::optional<double> max_height;      // exclusive
  std::vector<OcclusionRange> occlusion; // empty = any occlusion
  std::optional<double> max_truncation;  // inclusive

  bool admits(const GroundTruth &gt) const;
};

/// Caltech settings (Reasonable, All, Far, Medium, Near, Occ.none,
/// Occ.partial, Occ.heavy) and the KITTI filters (KITTI.easy, KITTI.moderate,
/// KITTI.hard).
const std::vector<EvalSetting> &standard_settings();

/// Case-insensitive lookup; throws ValidationError listing the known names.
const EvalSetting &setting_by_name(const std::string &name);

std::vector<GroundTruth> apply_setting(std::span<const GroundTruth> gts, const EvalSetting &setting);

/// Number of ground truths that count towards the miss rate under a setting.
std::size_t evaluated_count(std::span<const GroundTruth> gts, const EvalSetting &setting);

enum class DetVerdict { TruePositive, FalsePositive, Ignored };
enum class GtStatus { Matched, Missed, Ignored };

struct ImageMatch {
  std::vector<DetVerdict> detections; // parallel to the input detections
  std::vector<GtStatus> gts;          // parallel to the input gts
  std::vector<std::optional<std::size_t>> assigned_gt;
};

/// Greedy matching of one image's records. Detections are visited in
/// descending score order (input order on ties). Each takes the highest-IoU
/// unmatched evaluated gt with IoU >= threshold; failing that, an ignored gt
/// with IoU >= threshold makes it Ignored; otherwise it is a false positive.
ImageMatch match_detections(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                            double iou_threshold = 0.5);

struct CurvePoint {
  double fppi = 0.0;
  double miss_rate = 1.0;
  double threshold = 0.0;
};

/// Points in descending threshold order.
struct EvalCurve {
  std::vector<CurvePoint> points;
  std::size_t num_images = 0;
  std::size_t evaluated_gts = 0;
};

/// Sweeps every distinct detection score as an acceptance threshold
/// (score >= threshold). The image count is the number of distinct image ids
/// across detections and gts unless given. Throws ValidationError when no gt
/// survives the setting.
EvalCurve curve(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                const EvalSetting &setting, double iou_threshold = 0.5,
                std::optional<std::size_t> num_images = std::nullopt);

/// The nine FPPI reference points 10^(-2 + k/4), k = 0..8.
std::array<double, 9> reference_fppi();

/// Miss rate at the last curve point whose FPPI does not exceed fppi, or 1.
double miss_rate_at(const EvalCurve &c, double fppi);

inline constexpr double kMissRateFloor = 1e-6;

/// Geometric mean of the miss rates sampled at reference_fppi(), each
/// clamped below at kMissRateFloor.
double log_average_miss_rate(const EvalCurve &c);

struct AblationVariant {
  std::string name;
  std::vector<Detection> detections;
};

struct AblationTable {
  std::vector<std::string> variants;
  std::vector<std::string> settings;
  std::vector<std::vector<double>> lamr; // [variant][setting], NaN when the setting is empty
};

AblationTable ablation_report(std::span<const AblationVariant> variants,
                              std::span<const GroundTruth> gts,
                              std::span<const EvalSetting> settings, double iou_threshold = 0.5,
                              std::optional<std::size_t> num_images = std::nullopt);

} // namespace fdnn
