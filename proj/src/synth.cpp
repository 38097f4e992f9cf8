// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "fdnn/synth.hpp"

#include "fdnn/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace fdnn {

namespace {

constexpr double kMinBoxSide = 2.0;
constexpr double kOpinionNoise = 0.1;
constexpr double kOpinionMargin = 0.51;

std::string image_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "img%05d", i);
  return buf;
}

// Filled ellipse inscribed in the central part of the box: a crude silhouette.
void paint_silhouette(SegMask &mask, const BoundingBox &b) {
  const double cx = b.center_x(), cy = b.center_y();
  const double rx = 0.42 * b.w, ry = 0.48 * b.h;
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - rx)));
  const int x1 = std::min(mask.width - 1, static_cast<int>(std::ceil(cx + rx)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - ry)));
  const int y1 = std::min(mask.height - 1, static_cast<int>(std::ceil(cy + ry)));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      const double dx = (x + 0.5 - cx) / rx, dy = (y + 0.5 - cy) / ry;
      if (dx * dx + dy * dy <= 1.0)
        mask.set(x, y, 1);
    }
}

double clamp_score(double s) { return std::clamp(s, 0.001, 1.0); }

} // namespace

void SynthConfig::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (num_images < 0)
    throw ValidationError("num_images must be non-negative");
  if (image_width < 1 || image_height < 1)
    throw ValidationError("image dimensions must be positive");
  if (gts_min < 0 || gts_max < gts_min)
    throw ValidationError("gts per image requires 0 <= gts_min <= gts_max");
  if (!(gt_height_min > 0.0 && gt_height_max >= gt_height_min &&
        gt_height_max <= image_height))
    throw ValidationError("gt heights must satisfy 0 < min <= max <= image height");
  if (!(gt_aspect > 0.0 && gt_aspect * gt_height_max <= image_width))
    throw ValidationError("gt aspect ratio must be positive and fit the image");
  if (!in_unit(occluded_fraction) || !in_unit(cg_recall) || !in_unit(mask_fidelity))
    throw ValidationError("occluded_fraction, cg_recall and mask_fidelity must lie in [0, 1]");
  if (!(fp_rate >= 0.0) || !(localization_noise >= 0.0) || !(cg_score_spread >= 0.0))
    throw ValidationError("fp_rate, localization_noise and cg_score_spread must be non-negative");
  if (classifier_reliabilities.empty())
    throw ValidationError("at least one classifier reliability is required");
  for (double r : classifier_reliabilities)
    if (!(r >= 0.5 && r <= 1.0))
      throw ValidationError("classifier reliabilities must lie in [0.5, 1]");
}

bool is_true_candidate(const BoundingBox &candidate, std::span<const BoundingBox> gts) {
  return std::any_of(gts.begin(), gts.end(),
                     [&](const BoundingBox &g) { return jaccard(candidate, g) >= 0.5; });
}

double opinion_oracle(const Detection &candidate, std::span<const BoundingBox> gts,
                      double reliability, Xorshift64Star &rng) {
  if (!(reliability >= 0.5 && reliability <= 1.0))
    throw ValidationError("reliability must lie in [0.5, 1]");
  const bool truth = is_true_candidate(candidate.box, gts);
  const bool correct = rng.bernoulli(reliability);
  const double a = std::clamp(rng.normal(reliability, kOpinionNoise), kOpinionMargin, 1.0);
  return truth == correct ? a : 1.0 - a;
}

SynthCorpus generate(const SynthConfig &cfg) {
  cfg.validate();
  SynthCorpus corpus;
  corpus.opinions.resize(cfg.classifier_reliabilities.size());
  Xorshift64Star rng(cfg.seed);
  const double W = cfg.image_width, H = cfg.image_height;

  for (int img = 0; img < cfg.num_images; ++img) {
    const std::string image_id = image_name(img);
    corpus.image_ids.push_back(image_id);

    std::vector<BoundingBox> gt_boxes;
    const auto n_gts = rng.uniform_int(cfg.gts_min, cfg.gts_max);
    for (std::int64_t g = 0; g < n_gts; ++g) {
      const double h = rng.uniform(cfg.gt_height_min, cfg.gt_height_max);
      const double w = cfg.gt_aspect * h;
      GroundTruth gt;
      gt.box = {rng.uniform(0.0, W - w), rng.uniform(0.0, H - h), w, h};
      gt.image_id = image_id;
      const bool occluded = rng.bernoulli(cfg.occluded_fraction);
      const double occ = rng.uniform(0.0, 0.8);
      gt.occlusion = occluded ? occ : 0.0;
      gt_boxes.push_back(gt.box);
      corpus.gts.push_back(std::move(gt));
    }

    std::vector<Detection> dets;
    auto add_det = [&](const BoundingBox &b, double score) {
      Detection d;
      d.box = b;
      d.score = score;
      d.image_id = image_id;
      d.id = image_id + ":" + std::to_string(dets.size());
      d.source = "cg";
      dets.push_back(std::move(d));
    };
    for (const auto &gb : gt_boxes) {
      const bool found = rng.bernoulli(cfg.cg_recall);
      const double n = cfg.localization_noise;
      BoundingBox b{gb.x + n * rng.normal(), gb.y + n * rng.normal(),
                    std::max(kMinBoxSide, gb.w + n * rng.normal()),
                    std::max(kMinBoxSide, gb.h + n * rng.normal())};
      const double score =
          clamp_score(rng.normal(cfg.cg_true_score_mean, cfg.cg_score_spread));
      if (found)
        add_det(n == 0.0 ? gb : b, score);
    }
    const double whole = std::floor(cfg.fp_rate);
    const int n_fp = static_cast<int>(whole) + (rng.bernoulli(cfg.fp_rate - whole) ? 1 : 0);
    for (int f = 0; f < n_fp; ++f) {
      const double h = rng.uniform(cfg.gt_height_min, cfg.gt_height_max);
      const double w = std::min(W, cfg.gt_aspect * h * rng.uniform(0.8, 1.25));
      const BoundingBox b{rng.uniform(0.0, W - w), rng.uniform(0.0, H - h), w, h};
      add_det(b, clamp_score(rng.normal(cfg.cg_false_score_mean, cfg.cg_score_spread)));
    }

    for (const auto &d : dets)
      for (std::size_t k = 0; k < cfg.classifier_reliabilities.size(); ++k)
        corpus.opinions[k].push_back(
            {d.id, {opinion_oracle(d, gt_boxes, cfg.classifier_reliabilities[k], rng)}});
    corpus.cg_detections.insert(corpus.cg_detections.end(), dets.begin(), dets.end());

    if (cfg.emit_masks) {
      SegMask mask(cfg.image_width, cfg.image_height);
      for (const auto &gb : gt_boxes)
        if (rng.bernoulli(cfg.mask_fidelity))
          paint_silhouette(mask, gb);
      // spurious blob where the segmenter fires on background
      if (rng.bernoulli(1.0 - cfg.mask_fidelity)) {
        const double h = rng.uniform(cfg.gt_height_min, cfg.gt_height_max);
        const double w = cfg.gt_aspect * h;
        paint_silhouette(mask, {rng.uniform(0.0, W - w), rng.uniform(0.0, H - h), w, h});
      }
      corpus.masks.emplace(image_id, std::move(mask));
    }
  }
  return corpus;
}

} // namespace fdnn
