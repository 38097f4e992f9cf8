// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

// fdnn: detection fusion and evaluation toolkit.
//
// Exit status: 0 success, 1 usage or validation error, 2 runtime failure.

#include "fdnn/anchors.hpp"
#include "fdnn/config.hpp"
#include "fdnn/error.hpp"
#include "fdnn/evaluation.hpp"
#include "fdnn/fusion.hpp"
#include "fdnn/fusion_network.hpp"
#include "fdnn/io.hpp"
#include "fdnn/pipeline.hpp"
#include "fdnn/report.hpp"
#include "fdnn/segfusion.hpp"
#include "fdnn/softlabel.hpp"
#include "fdnn/synth.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace fs = std::filesystem;
using namespace fdnn;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;

  IniConfig ini() const { return config.empty() ? IniConfig{} : IniConfig::load(config); }
};

void add_common(CLI::App *cmd, Common &c, const char *out_help) {
  cmd->add_option("--config", c.config, "Sectioned key=value config file");
  cmd->add_option("--seed", c.seed, "Seed for every random draw");
  cmd->add_option("--out", c.out, out_help);
}

/// Output stream for --out, or stdout when it is empty or "-".
class Sink {
public:
  explicit Sink(const std::string &path) {
    if (path.empty() || path == "-")
      return;
    if (auto parent = fs::path(path).parent_path(); !parent.empty())
      fs::create_directories(parent);
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_)
      throw RuntimeFailure("cannot write '" + path + "'");
  }
  std::ostream &stream() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

std::string require_out_dir(const Common &c, const char *cmd) {
  if (c.out.empty())
    throw ValidationError(std::string(cmd) + ": --out <directory> is required");
  return c.out;
}

// ------------------------------------------------------------------ anchors

struct AnchorsArgs {
  Common common;
  std::string gt;
  std::string image_id;
  double threshold = 0.5;
};

void run_anchors(const AnchorsArgs &a) {
  const IniConfig ini = a.common.ini();
  const AnchorJob job = anchor_job_from(ini);
  if (job.layers.empty() && !a.common.config.empty() && !ini.has("anchors.layers"))
    throw ValidationError("anchors: config has no anchors.layers entry");
  const auto boxes = generate_default_boxes(job.layers, job.config);

  std::vector<AnchorMatch> matches;
  if (!a.gt.empty()) {
    std::vector<BoundingBox> gt_boxes;
    for (const auto &g : read_ground_truth_file(a.gt))
      if (a.image_id.empty() || g.image_id == a.image_id)
        gt_boxes.push_back(g.box);
    matches = match_anchors(boxes, gt_boxes, a.threshold);
  }

  Sink sink(a.common.out);
  auto &os = sink.stream();
  std::size_t index = 0;
  for (const auto &layer : job.layers) {
    const std::size_t n = static_cast<std::size_t>(layer.rows) *
                          static_cast<std::size_t>(layer.cols) * job.config.boxes_per_cell();
    for (std::size_t i = 0; i < n; ++i, ++index) {
      const auto &b = boxes[index];
      os << "{\"layer\":\"" << layer.name << "\",\"index\":" << index
         << ",\"x\":" << format_real(b.x) << ",\"y\":" << format_real(b.y)
         << ",\"w\":" << format_real(b.w) << ",\"h\":" << format_real(b.h);
      if (!matches.empty()) {
        os << ",\"positive\":" << (matches[index].positive ? "true" : "false")
           << ",\"matched_gt\":";
        if (matches[index].matched_gt)
          os << *matches[index].matched_gt;
        else
          os << "null";
      }
      os << "}\n";
    }
  }
}

// -------------------------------------------------------------------- label

struct LabelArgs {
  Common common;
  std::string detections;
  std::string gt;
  std::vector<std::string> opinions;
  std::optional<double> th_a, th_b, min_score, min_height;
  bool no_inject = false;
};

void run_label(const LabelArgs &a) {
  const IniConfig ini = a.common.ini();
  LabelThresholds thr;
  thr.th_a = a.th_a.value_or(ini.real("labels.th_a", thr.th_a));
  thr.th_b = a.th_b.value_or(ini.real("labels.th_b", thr.th_b));
  thr.validate();
  const double min_score = a.min_score.value_or(ini.real("labels.min_score", 0.01));
  const double min_height = a.min_height.value_or(ini.real("labels.min_height", 40.0));

  const auto dets = read_detections_file(a.detections);
  const auto gts = read_ground_truth_file(a.gt);
  // injected ground truths have no verifier opinions to attach
  const bool inject = !a.no_inject && a.opinions.empty();
  const auto labeled = build_training_set(dets, gts, thr, min_score, min_height, inject);

  std::vector<ClassifierOpinion> opinions;
  if (!a.opinions.empty()) {
    std::vector<std::vector<ClassifierOpinion>> lists;
    for (const auto &p : a.opinions)
      lists.push_back(read_opinions_file(p));
    opinions = merge_opinions(lists);
  }
  std::unordered_map<std::string, const ClassifierOpinion *> by_id;
  for (const auto &o : opinions)
    by_id.emplace(o.candidate_id, &o);

  Sink sink(a.common.out);
  for (const auto &c : labeled) {
    LabeledRecord r{c, std::nullopt};
    if (!opinions.empty()) {
      auto it = by_id.find(c.detection.id);
      if (it == by_id.end())
        throw ValidationError("label: no opinion for candidate '" + c.detection.id + "'");
      r.probs = it->second->probs;
    }
    write_labeled(sink.stream(), r);
  }
}

// --------------------------------------------------------------------- fuse

struct FuseArgs {
  Common common;
  std::string detections;
  std::vector<std::string> opinions;
  std::string model;
  std::optional<double> t1, t2, floor;
  std::vector<double> weights;
  std::string network;
};

void run_fuse(const FuseArgs &a) {
  const IniConfig ini = a.common.ini();
  const std::string model_name = a.model.empty() ? ini.text("fusion.model", "soft-rejection")
                                                 : a.model;
  const double floor = a.floor.value_or(ini.real("fusion.log_prob_floor", kDefaultLogProbFloor));
  FusionModel model;
  if (model_name == "soft-rejection") {
    SoftRejectionParams p;
    p.t1 = a.t1.value_or(ini.real("fusion.t1", p.t1));
    p.t2 = a.t2.value_or(ini.real("fusion.t2", p.t2));
    p.validate();
    model = p;
  } else if (model_name == "weights") {
    FusionWeights w{a.weights.empty() ? ini.reals("fusion.weights", {}) : a.weights};
    if (w.w.empty())
      throw ValidationError("fuse: model 'weights' needs --weights");
    w.validate();
    model = w;
  } else if (model_name == "network") {
    const std::string path = a.network.empty() ? ini.path("fusion.network") : a.network;
    if (path.empty())
      throw ValidationError("fuse: model 'network' needs --network");
    model = std::make_shared<const FusionNetwork>(read_network_file(path));
  } else {
    throw ValidationError("fuse: --model must be soft-rejection, weights or network");
  }

  const auto dets = read_detections_file(a.detections);
  std::vector<std::vector<ClassifierOpinion>> lists;
  for (const auto &p : a.opinions)
    lists.push_back(read_opinions_file(p));
  const auto fused = fuse_batch(dets, merge_opinions(lists), model, floor);
  Sink sink(a.common.out);
  write_detections(sink.stream(), fused);
}

// ------------------------------------------------------------- train-fusion

struct TrainArgs {
  Common common;
  std::string labeled;
  std::optional<double> lr, floor;
  std::optional<int> epochs;
  std::optional<std::size_t> batch, hidden1, hidden2;
  bool verbose = false;
};

void run_train(const TrainArgs &a) {
  const IniConfig ini = a.common.ini();
  TrainConfig cfg;
  cfg.learning_rate = a.lr.value_or(ini.real("train.learning_rate", cfg.learning_rate));
  cfg.epochs = a.epochs.value_or(static_cast<int>(ini.integer("train.epochs", cfg.epochs)));
  cfg.batch_size = a.batch.value_or(
      static_cast<std::size_t>(ini.integer("train.batch_size", static_cast<long>(cfg.batch_size))));
  cfg.hidden1 = a.hidden1.value_or(
      static_cast<std::size_t>(ini.integer("train.hidden1", static_cast<long>(cfg.hidden1))));
  cfg.hidden2 = a.hidden2.value_or(
      static_cast<std::size_t>(ini.integer("train.hidden2", static_cast<long>(cfg.hidden2))));
  cfg.seed = a.common.seed.value_or(
      static_cast<std::uint64_t>(ini.integer("train.seed", static_cast<long>(cfg.seed))));
  cfg.log_prob_floor = a.floor.value_or(ini.real("train.log_prob_floor", cfg.log_prob_floor));
  cfg.validate();

  const auto records = read_labeled_file(a.labeled);
  const auto samples = to_fusion_samples(records);
  TrainReport report;
  const FusionNetwork net = train_fusion_network(samples, cfg, &report);

  Sink sink(a.common.out);
  net.save(sink.stream());

  std::vector<std::vector<double>> probs;
  for (const auto &s : samples)
    probs.push_back(s.probs);
  const FusionWeights mean = mean_weights(net, probs, cfg.log_prob_floor);
  std::ostream &log = a.common.out.empty() || a.common.out == "-" ? std::cerr : std::cout;
  if (a.verbose)
    for (std::size_t e = 0; e < report.epoch_loss.size(); ++e)
      log << "epoch " << e << " loss " << format_real(report.epoch_loss[e]) << '\n';
  log << "mean weights:";
  for (double w : mean.w)
    log << ' ' << format_real(w);
  log << '\n';
}

// ------------------------------------------------------------------ segfuse

struct SegfuseArgs {
  Common common;
  std::string detections;
  std::string masks;
  std::string kernel;
  std::string gt;
  bool estimate = false;
  std::string mode;
  std::optional<std::size_t> rows, cols;
  std::string kernel_out;
  std::string ss_detections;
  std::string ss_out;
};

void run_segfuse(const SegfuseArgs &a) {
  const IniConfig ini = a.common.ini();
  const SegFusionMode mode = parse_segfusion_mode(a.mode.empty() ? ini.text("segfusion.mode", "kernel")
                                                                 : a.mode);
  if (mode == SegFusionMode::Off)
    throw ValidationError("segfuse: mode 'off' has nothing to do");
  const auto dets = read_detections_file(a.detections);
  const MaskStore masks = load_mask_directory(a.masks);

  std::vector<Detection> fused;
  if (mode == SegFusionMode::Kernel) {
    Kernel kernel;
    if (a.estimate) {
      if (a.gt.empty())
        throw ValidationError("segfuse: --estimate-kernel needs --gt");
      std::vector<GroundTruth> train;
      for (auto &g : read_ground_truth_file(a.gt))
        if (!g.ignore)
          train.push_back(std::move(g));
      const auto rows = a.rows.value_or(static_cast<std::size_t>(
          ini.integer("segfusion.kernel_rows", static_cast<long>(kDefaultKernelRows))));
      const auto cols = a.cols.value_or(static_cast<std::size_t>(
          ini.integer("segfusion.kernel_cols", static_cast<long>(kDefaultKernelCols))));
      kernel = estimate_kernel(train, masks, rows, cols);
      if (!a.kernel_out.empty()) {
        Sink ks(a.kernel_out);
        write_kernel(ks.stream(), kernel);
      }
    } else {
      const std::string path = a.kernel.empty() ? ini.path("inputs.kernel") : a.kernel;
      if (path.empty())
        throw ValidationError("segfuse: give --kernel or --estimate-kernel");
      std::ifstream in(path);
      if (!in)
        throw ValidationError("cannot open '" + path + "'");
      kernel = read_kernel(in, path);
    }
    fused = seg_fuse_detections(dets, masks, kernel);
  } else {
    LegacySegParams p;
    p.a_ss = ini.real("segfusion.a_ss", p.a_ss);
    p.b_ss = ini.real("segfusion.b_ss", p.b_ss);
    p.accept_threshold = ini.real("segfusion.accept_threshold", p.accept_threshold);
    fused = legacy_seg_fuse_detections(dets, masks, p);
  }

  Sink sink(a.common.out);
  write_detections(sink.stream(), fused);

  if (!a.ss_detections.empty()) {
    if (a.ss_out.empty())
      throw ValidationError("segfuse: --ss-detections needs --ss-out");
    const auto ss = read_detections_file(a.ss_detections);
    Sink ss_sink(a.ss_out);
    write_detections(ss_sink.stream(), suppress_ss_only(ss, dets));
  }
}

// --------------------------------------------------------------------- eval

struct EvalArgs {
  Common common;
  std::vector<std::string> detections;
  std::string gt;
  std::vector<std::string> settings;
  std::optional<double> iou;
  std::optional<std::size_t> num_images;
};

void run_eval(const EvalArgs &a) {
  const IniConfig ini = a.common.ini();
  std::vector<std::string> names = a.settings;
  if (names.empty())
    names = ini.has("evaluation.settings") ? ini.list("evaluation.settings")
                                           : std::vector<std::string>{"Reasonable"};
  std::vector<EvalSetting> settings;
  for (const auto &n : names)
    settings.push_back(setting_by_name(n));
  const double iou = a.iou.value_or(ini.real("evaluation.iou_threshold", 0.5));
  std::optional<std::size_t> num_images = a.num_images;
  if (!num_images && ini.has("evaluation.num_images"))
    num_images = static_cast<std::size_t>(ini.integer("evaluation.num_images", 1));

  const auto gts = read_ground_truth_file(a.gt);
  std::vector<AblationVariant> variants;
  for (const auto &p : a.detections)
    variants.push_back({fs::path(p).stem().string(), read_detections_file(p)});
  const AblationTable table = ablation_report(variants, gts, settings, iou, num_images);
  write_ablation_text(std::cout, table);

  if (a.common.out.empty())
    return;
  const fs::path dir(a.common.out);
  fs::create_directories(dir);
  {
    Sink csv((dir / "report.csv").string());
    write_ablation_csv(csv.stream(), table);
  }
  {
    Sink txt((dir / "report.txt").string());
    write_ablation_text(txt.stream(), table);
  }
  for (const auto &s : settings) {
    if (evaluated_count(gts, s) == 0)
      continue;
    std::vector<NamedCurve> curves;
    for (const auto &v : variants) {
      curves.emplace_back(v.name, curve(v.detections, gts, s, iou, num_images));
      Sink c((dir / ("curve_" + file_slug(v.name) + "_" + file_slug(s.name) + ".csv")).string());
      write_curve_csv(c.stream(), curves.back().second);
    }
    Sink svg((dir / ("curves_" + file_slug(s.name) + ".svg")).string());
    write_curves_svg(svg.stream(), curves, s.name);
  }
}

// -------------------------------------------------------------------- synth

void run_synth(const Common &c) {
  const IniConfig ini = c.ini();
  SynthConfig cfg = synth_config_from(ini);
  if (c.seed)
    cfg.seed = *c.seed;
  const auto corpus = generate(cfg);
  const auto written = write_synth_corpus(corpus, require_out_dir(c, "synth"));
  std::cout << "wrote " << written.size() << " files to " << c.out << '\n';
}

// ----------------------------------------------------------------- pipeline

void run_pipeline_cmd(const Common &c) {
  if (c.config.empty())
    throw ValidationError("pipeline: --config is required");
  PipelineConfig cfg = pipeline_config_from(c.ini());
  if (!c.out.empty())
    cfg.output_dir = c.out;
  const auto result = run_pipeline(cfg);
  if (result.ablation)
    write_ablation_text(std::cout, *result.ablation);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Detection fusion and evaluation toolkit"};
  app.require_subcommand(1);

  AnchorsArgs anchors;
  auto *cmd_anchors = app.add_subcommand("anchors", "Generate default boxes from a config");
  add_common(cmd_anchors, anchors.common, "Output file (default stdout)");
  cmd_anchors->add_option("--gt", anchors.gt, "Ground truth to label anchors against");
  cmd_anchors->add_option("--image-id", anchors.image_id, "Restrict --gt to one image");
  cmd_anchors->add_option("--threshold", anchors.threshold, "Jaccard threshold for positives");

  LabelArgs label;
  auto *cmd_label = app.add_subcommand("label", "Assign soft labels to candidates");
  add_common(cmd_label, label.common, "Labeled candidates file (default stdout)");
  cmd_label->add_option("--detections", label.detections)->required();
  cmd_label->add_option("--gt", label.gt)->required();
  cmd_label->add_option("--opinions", label.opinions, "Attach verifier probabilities");
  cmd_label->add_option("--th-a", label.th_a);
  cmd_label->add_option("--th-b", label.th_b);
  cmd_label->add_option("--min-score", label.min_score);
  cmd_label->add_option("--min-height", label.min_height);
  cmd_label->add_flag("--no-inject-gt", label.no_inject, "Do not add ground truths as candidates");

  FuseArgs fuse;
  auto *cmd_fuse = app.add_subcommand("fuse", "Fuse candidate scores with verifier opinions");
  add_common(cmd_fuse, fuse.common, "Fused detections file (default stdout)");
  cmd_fuse->add_option("--detections", fuse.detections)->required();
  cmd_fuse->add_option("--opinions", fuse.opinions, "One file per network")->required();
  cmd_fuse->add_option("--model", fuse.model, "soft-rejection | weights | network");
  cmd_fuse->add_option("--t1", fuse.t1);
  cmd_fuse->add_option("--t2", fuse.t2);
  cmd_fuse->add_option("--weights", fuse.weights)->delimiter(',');
  cmd_fuse->add_option("--network", fuse.network, "Trained fusion network file");
  cmd_fuse->add_option("--floor", fuse.floor, "Probability floor before log");

  TrainArgs train;
  auto *cmd_train = app.add_subcommand("train-fusion", "Train the fusion network");
  add_common(cmd_train, train.common, "Network file (default stdout)");
  cmd_train->add_option("--labeled", train.labeled, "Labeled candidates with probs")->required();
  cmd_train->add_option("--learning-rate", train.lr);
  cmd_train->add_option("--epochs", train.epochs);
  cmd_train->add_option("--batch-size", train.batch);
  cmd_train->add_option("--hidden1", train.hidden1);
  cmd_train->add_option("--hidden2", train.hidden2);
  cmd_train->add_option("--floor", train.floor);
  cmd_train->add_flag("--verbose", train.verbose, "Print the loss after every epoch");

  SegfuseArgs seg;
  auto *cmd_seg = app.add_subcommand("segfuse", "Fuse detections with segmentation masks");
  add_common(cmd_seg, seg.common, "Fused detections file (default stdout)");
  cmd_seg->add_option("--detections", seg.detections)->required();
  cmd_seg->add_option("--masks", seg.masks, "Directory of <image_id>.pgm")->required();
  cmd_seg->add_option("--kernel", seg.kernel, "Kernel text file");
  cmd_seg->add_flag("--estimate-kernel", seg.estimate, "Estimate the kernel from --gt");
  cmd_seg->add_option("--gt", seg.gt);
  cmd_seg->add_option("--mode", seg.mode, "kernel | legacy");
  cmd_seg->add_option("--kernel-rows", seg.rows);
  cmd_seg->add_option("--kernel-cols", seg.cols);
  cmd_seg->add_option("--kernel-out", seg.kernel_out, "Write the estimated kernel");
  cmd_seg->add_option("--ss-detections", seg.ss_detections,
                      "Segmentation-only detections to filter against the candidates");
  cmd_seg->add_option("--ss-out", seg.ss_out);

  EvalArgs ev;
  auto *cmd_eval = app.add_subcommand("eval", "Miss rate vs FPPI evaluation");
  add_common(cmd_eval, ev.common, "Report directory (CSV, curves, SVG)");
  cmd_eval->add_option("--detections", ev.detections, "Repeat to compare variants")->required();
  cmd_eval->add_option("--gt", ev.gt)->required();
  cmd_eval->add_option("--setting", ev.settings, "Evaluation setting, repeatable");
  cmd_eval->add_option("--iou", ev.iou);
  cmd_eval->add_option("--num-images", ev.num_images);

  Common synth;
  auto *cmd_synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  add_common(cmd_synth, synth, "Output directory");

  Common pipe;
  auto *cmd_pipe = app.add_subcommand("pipeline", "Run fusion, segmentation fusion and evaluation");
  add_common(cmd_pipe, pipe, "Output directory (overrides output.directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*cmd_anchors)
      run_anchors(anchors);
    else if (*cmd_label)
      run_label(label);
    else if (*cmd_fuse)
      run_fuse(fuse);
    else if (*cmd_train)
      run_train(train);
    else if (*cmd_seg)
      run_segfuse(seg);
    else if (*cmd_eval)
      run_eval(ev);
    else if (*cmd_synth)
      run_synth(synth);
    else if (*cmd_pipe)
      run_pipeline_cmd(pipe);
  } catch (const ValidationError &e) {
    std::cerr << "fdnn: " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "fdnn: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
