// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#pragma once

// Line-delimited JSON record codecs. One object per line; blank lines are
// skipped; every rejected line raises ParseError with its line number.
//
//   detection     {"image_id", "id", "class", "x", "y", "w", "h", "score"[, "source"]}
//   ground truth  {"image_id", "x", "y", "w", "h", "occlusion", "ignore", "class"[, "truncation"]}
//   opinion       {"id", "probs": [...]}
//   labeled       detection fields + {"label": [ped, bg], "matched_gt": index|null,
//                  "injected": bool[, "probs": [...]]}
//
// Reals are written with 9 significant digits; scores are clamped to [0, 1]
// on output.

#include "fdnn/fusion.hpp"
#include "fdnn/fusion_network.hpp"
#include "fdnn/geometry.hpp"
#include "fdnn/softlabel.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fdnn {

/// "%.9g"
std::string format_real(double v);

std::vector<Detection> parse_detections(std::istream &is, const std::string &source = "<detections>");
std::vector<GroundTruth> parse_ground_truth(std::istream &is,
                                            const std::string &source = "<ground truth>");
/// Rejects duplicate candidate ids.
std::vector<ClassifierOpinion> parse_opinions(std::istream &is,
                                              const std::string &source = "<opinions>");

struct LabeledRecord {
  LabeledCandidate candidate;
  std::optional<std::vector<double>> probs;

  bool operator==(const LabeledRecord &) const = default;
};

std::vector<LabeledRecord> parse_labeled(std::istream &is, const std::string &source = "<labeled>");

void write_detection(std::ostream &os, const Detection &d);
void write_ground_truth(std::ostream &os, const GroundTruth &g);
void write_opinion(std::ostream &os, const ClassifierOpinion &o);
void write_labeled(std::ostream &os, const LabeledRecord &r);

void write_detections(std::ostream &os, std::span<const Detection> dets);
void write_ground_truths(std::ostream &os, std::span<const GroundTruth> gts);
void write_opinions(std::ostream &os, std::span<const ClassifierOpinion> ops);

// File helpers; an unreadable path raises ValidationError.
std::vector<Detection> read_detections_file(const std::string &path);
std::vector<GroundTruth> read_ground_truth_file(const std::string &path);
std::vector<ClassifierOpinion> read_opinions_file(const std::string &path);
std::vector<LabeledRecord> read_labeled_file(const std::string &path);
FusionNetwork read_network_file(const std::string &path);

/// Labeled records carrying probs, as fusion-network training samples.
/// Throws ValidationError naming the first record without probs.
std::vector<FusionSample> to_fusion_samples(std::span<const LabeledRecord> records);

} // namespace fdnn
