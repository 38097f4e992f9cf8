// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#pragma once

// Detection dataflow: candidate generator -> classification fusion ->
// segmentation fusion -> evaluation.

#include "fdnn/config.hpp"
#include "fdnn/evaluation.hpp"
#include "fdnn/fusion.hpp"
#include "fdnn/segfusion.hpp"
#include "fdnn/softlabel.hpp"
#include "fdnn/synth.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fdnn {

enum class SegFusionMode { Off, Kernel, Legacy };

SegFusionMode parse_segfusion_mode(const std::string &s);

enum class FusionKind { None, SoftRejection, Weights, Network };

struct PipelineConfig {
  std::string detections;
  std::vector<std::string> opinions; // one file per network, or one K-wide file
  std::string ground_truth;          // empty: skip evaluation
  std::string masks;                 // directory of <image_id>.pgm
  std::string kernel;                // empty: estimate from ground truth

  FusionKind fusion = FusionKind::SoftRejection;
  SoftRejectionParams soft_rejection;
  FusionWeights weights;
  std::string network;
  double log_prob_floor = kDefaultLogProbFloor;

  SegFusionMode segfusion = SegFusionMode::Off;
  std::size_t kernel_rows = kDefaultKernelRows;
  std::size_t kernel_cols = kDefaultKernelCols;
  LegacySegParams legacy;

  std::vector<std::string> settings = {"Reasonable"};
  double iou_threshold = 0.5;
  std::optional<std::size_t> num_images;

  std::string output_dir = "out";

  /// Throws ValidationError naming the first problem, including missing files.
  void validate() const;
};

/// Reads the [inputs], [fusion], [segfusion], [evaluation] and [output]
/// sections; relative paths resolve against the config file's directory.
PipelineConfig pipeline_config_from(const IniConfig &ini);

struct PipelineResult {
  std::vector<Detection> fused;          // final scores, unclamped
  std::optional<AblationTable> ablation; // present when ground truth was given
  std::vector<std::string> written;      // output files, in write order
};

/// Writes fused_detections.jsonl and, with ground truth, report.txt,
/// report.csv, curve_<setting>.csv and curves_<setting>.svg; kernel.txt when
/// the kernel was estimated. Output depends only on the inputs and cfg.
PipelineResult run_pipeline(const PipelineConfig &cfg);

/// Writes gt.jsonl, detections.jsonl, opinions_<k>.jsonl and masks/<id>.pgm.
std::vector<std::string> write_synth_corpus(const SynthCorpus &corpus, const std::string &dir);

/// Deterministic file-name form of a setting name ("Occ.none" -> "occ_none").
std::string file_slug(const std::string &name);

} // namespace fdnn
