// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "fdnn/pipeline.hpp"

#include "fdnn/error.hpp"
#include "fdnn/fusion_network.hpp"
#include "fdnn/io.hpp"
#include "fdnn/report.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <memory>

namespace fdnn {

namespace fs = std::filesystem;

SegFusionMode parse_segfusion_mode(const std::string &s) {
  if (s == "off")
    return SegFusionMode::Off;
  if (s == "kernel")
    return SegFusionMode::Kernel;
  if (s == "legacy")
    return SegFusionMode::Legacy;
  throw ValidationError("segfusion mode must be kernel, legacy or off, got '" + s + "'");
}

namespace {

void require_file(const std::string &path, const char *what) {
  if (path.empty())
    throw ValidationError(std::string("pipeline: ") + what + " path is not set");
  if (!fs::exists(path))
    throw ValidationError(std::string("pipeline: ") + what + " '" + path + "' does not exist");
}

std::ofstream open_out(const std::string &path, std::vector<std::string> &written) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw RuntimeFailure("cannot write '" + path + "'");
  written.push_back(path);
  return out;
}

} // namespace

void PipelineConfig::validate() const {
  require_file(detections, "detections");
  if (fusion != FusionKind::None) {
    if (opinions.empty())
      throw ValidationError("pipeline: classification fusion needs at least one opinions file");
    for (const auto &p : opinions)
      require_file(p, "opinions");
  }
  switch (fusion) {
  case FusionKind::SoftRejection:
    soft_rejection.validate();
    break;
  case FusionKind::Weights:
    if (weights.w.empty())
      throw ValidationError("pipeline: fusion model 'weights' needs fusion.weights");
    weights.validate();
    break;
  case FusionKind::Network:
    require_file(network, "fusion network");
    break;
  case FusionKind::None:
    break;
  }
  if (!(log_prob_floor > 0.0 && log_prob_floor < 1.0))
    throw ValidationError("pipeline: log_prob_floor must lie in (0, 1)");
  if (segfusion != SegFusionMode::Off) {
    if (masks.empty() || !fs::is_directory(masks))
      throw ValidationError("pipeline: segmentation fusion needs an existing masks directory");
    if (segfusion == SegFusionMode::Kernel && kernel.empty() && ground_truth.empty())
      throw ValidationError("pipeline: kernel fusion needs a kernel file or ground truth");
    if (!kernel.empty())
      require_file(kernel, "kernel");
  }
  if (!ground_truth.empty()) {
    require_file(ground_truth, "ground truth");
    if (settings.empty())
      throw ValidationError("pipeline: no evaluation settings requested");
    for (const auto &s : settings)
      setting_by_name(s);
  }
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
    throw ValidationError("pipeline: iou_threshold must lie in (0, 1]");
  if (output_dir.empty())
    throw ValidationError("pipeline: output directory is not set");
}

PipelineConfig pipeline_config_from(const IniConfig &ini) {
  PipelineConfig c;
  c.detections = ini.path("inputs.detections");
  for (const auto &p : ini.list("inputs.opinions")) {
    fs::path path(p);
    if (path.is_relative() && !ini.base_dir().empty())
      path = fs::path(ini.base_dir()) / path;
    c.opinions.push_back(path.lexically_normal().string());
  }
  c.ground_truth = ini.path("inputs.ground_truth");
  c.masks = ini.path("inputs.masks");
  c.kernel = ini.path("inputs.kernel");

  const std::string model = ini.text("fusion.model", "soft-rejection");
  if (model == "soft-rejection")
    c.fusion = FusionKind::SoftRejection;
  else if (model == "weights")
    c.fusion = FusionKind::Weights;
  else if (model == "network")
    c.fusion = FusionKind::Network;
  else if (model == "none")
    c.fusion = FusionKind::None;
  else
    throw ValidationError("fusion.model must be soft-rejection, weights, network or none");
  c.soft_rejection.t1 = ini.real("fusion.t1", c.soft_rejection.t1);
  c.soft_rejection.t2 = ini.real("fusion.t2", c.soft_rejection.t2);
  c.weights.w = ini.reals("fusion.weights", {});
  c.network = ini.path("fusion.network");
  c.log_prob_floor = ini.real("fusion.log_prob_floor", c.log_prob_floor);

  c.segfusion = parse_segfusion_mode(ini.text("segfusion.mode", "off"));
  const long rows = ini.integer("segfusion.kernel_rows", static_cast<long>(c.kernel_rows));
  const long cols = ini.integer("segfusion.kernel_cols", static_cast<long>(c.kernel_cols));
  if (rows < 1 || cols < 1)
    throw ValidationError("segfusion kernel size must be at least 1x1");
  c.kernel_rows = static_cast<std::size_t>(rows);
  c.kernel_cols = static_cast<std::size_t>(cols);
  c.legacy.a_ss = ini.real("segfusion.a_ss", c.legacy.a_ss);
  c.legacy.b_ss = ini.real("segfusion.b_ss", c.legacy.b_ss);
  c.legacy.accept_threshold = ini.real("segfusion.accept_threshold", c.legacy.accept_threshold);

  if (ini.has("evaluation.settings"))
    c.settings = ini.list("evaluation.settings");
  c.iou_threshold = ini.real("evaluation.iou_threshold", c.iou_threshold);
  if (ini.has("evaluation.num_images")) {
    const long n = ini.integer("evaluation.num_images", 0);
    if (n < 1)
      throw ValidationError("evaluation.num_images must be positive");
    c.num_images = static_cast<std::size_t>(n);
  }
  c.output_dir = ini.path("output.directory");
  if (c.output_dir.empty())
    c.output_dir = "out";
  return c;
}

std::string file_slug(const std::string &name) {
  std::string s;
  for (char ch : name)
    s.push_back(std::isalnum(static_cast<unsigned char>(ch))
                    ? static_cast<char>(std::tolower(static_cast<unsigned char>(ch)))
                    : '_');
  return s;
}

PipelineResult run_pipeline(const PipelineConfig &cfg) {
  cfg.validate();
  PipelineResult result;
  fs::create_directories(cfg.output_dir);
  const fs::path out_dir(cfg.output_dir);

  const auto cg = read_detections_file(cfg.detections);
  std::vector<AblationVariant> variants{{"CG", cg}};

  std::vector<Detection> current = cg;
  if (cfg.fusion != FusionKind::None) {
    std::vector<std::vector<ClassifierOpinion>> lists;
    for (const auto &p : cfg.opinions)
      lists.push_back(read_opinions_file(p));
    const auto opinions = merge_opinions(lists);
    FusionModel model;
    switch (cfg.fusion) {
    case FusionKind::SoftRejection:
      model = cfg.soft_rejection;
      break;
    case FusionKind::Weights:
      model = cfg.weights;
      break;
    default:
      model = std::make_shared<const FusionNetwork>(read_network_file(cfg.network));
      break;
    }
    current = fuse_batch(current, opinions, model, cfg.log_prob_floor);
    variants.push_back({"CG+fusion", current});
  }

  std::vector<GroundTruth> gts;
  if (!cfg.ground_truth.empty())
    gts = read_ground_truth_file(cfg.ground_truth);

  if (cfg.segfusion != SegFusionMode::Off) {
    const MaskStore masks = load_mask_directory(cfg.masks);
    if (cfg.segfusion == SegFusionMode::Kernel) {
      Kernel kernel;
      if (!cfg.kernel.empty()) {
        std::ifstream in(cfg.kernel);
        kernel = read_kernel(in, cfg.kernel);
      } else {
        std::vector<GroundTruth> train;
        for (const auto &g : gts)
          if (!g.ignore)
            train.push_back(g);
        kernel = estimate_kernel(train, masks, cfg.kernel_rows, cfg.kernel_cols);
        auto out = open_out((out_dir / "kernel.txt").string(), result.written);
        write_kernel(out, kernel);
      }
      current = seg_fuse_detections(current, masks, kernel);
    } else {
      current = legacy_seg_fuse_detections(current, masks, cfg.legacy);
    }
    variants.push_back({cfg.fusion == FusionKind::None ? "CG+seg" : "CG+fusion+seg", current});
  }

  {
    auto out = open_out((out_dir / "fused_detections.jsonl").string(), result.written);
    write_detections(out, current);
  }

  if (!gts.empty() || !cfg.ground_truth.empty()) {
    std::vector<EvalSetting> settings;
    for (const auto &s : cfg.settings)
      settings.push_back(setting_by_name(s));
    AblationTable table =
        ablation_report(variants, gts, settings, cfg.iou_threshold, cfg.num_images);
    {
      auto out = open_out((out_dir / "report.txt").string(), result.written);
      write_ablation_text(out, table);
    }
    {
      auto out = open_out((out_dir / "report.csv").string(), result.written);
      write_ablation_csv(out, table);
    }
    for (const auto &s : settings) {
      if (evaluated_count(gts, s) == 0)
        continue;
      std::vector<NamedCurve> curves;
      for (const auto &v : variants) {
        curves.emplace_back(v.name,
                            curve(v.detections, gts, s, cfg.iou_threshold, cfg.num_images));
        auto out = open_out(
            (out_dir / ("curve_" + file_slug(v.name) + "_" + file_slug(s.name) + ".csv")).string(),
            result.written);
        write_curve_csv(out, curves.back().second);
      }
      auto out =
          open_out((out_dir / ("curves_" + file_slug(s.name) + ".svg")).string(), result.written);
      write_curves_svg(out, curves, s.name);
    }
    result.ablation = std::move(table);
  }
  result.fused = std::move(current);
  return result;
}

std::vector<std::string> write_synth_corpus(const SynthCorpus &corpus, const std::string &dir) {
  std::vector<std::string> written;
  const fs::path root(dir);
  fs::create_directories(root);
  {
    auto out = open_out((root / "gt.jsonl").string(), written);
    write_ground_truths(out, corpus.gts);
  }
  {
    auto out = open_out((root / "detections.jsonl").string(), written);
    write_detections(out, corpus.cg_detections);
  }
  for (std::size_t k = 0; k < corpus.opinions.size(); ++k) {
    auto out = open_out((root / ("opinions_" + std::to_string(k) + ".jsonl")).string(), written);
    write_opinions(out, corpus.opinions[k]);
  }
  if (!corpus.masks.empty()) {
    fs::create_directories(root / "masks");
    for (const auto &[id, mask] : corpus.masks) {
      auto out = open_out((root / "masks" / (id + ".pgm")).string(), written);
      write_pgm(out, mask);
    }
  }
  return written;
}

} // namespace fdnn
