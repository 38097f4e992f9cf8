// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "fdnn/evaluation.hpp"

#include "fdnn/error.hpp"
#include "fdnn/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

namespace fdnn {

bool EvalSetting::admits(const GroundTruth &gt) const {
  if (gt.box.h < min_height)
    return false;
  if (max_height && !(gt.box.h < *max_height))
    return false;
  if (max_truncation && gt.truncation > *max_truncation)
    return false;
  if (occlusion.empty())
    return true;
  return std::any_of(occlusion.begin(), occlusion.end(),
                     [&](const OcclusionRange &r) { return r.contains(gt.occlusion); });
}

const std::vector<EvalSetting> &standard_settings() {
  static const std::vector<EvalSetting> settings = {
      {"Reasonable", 50.0, std::nullopt, {kOccNone, kOccPartial}, std::nullopt},
      {"All", 20.0, std::nullopt, {kOccNone, kOccPartial, kOccHeavy}, std::nullopt},
      {"Far", 20.0, 30.0, {kOccNone}, std::nullopt},
      {"Medium", 30.0, 80.0, {kOccNone}, std::nullopt},
      {"Near", 80.0, std::nullopt, {kOccNone}, std::nullopt},
      {"Occ.none", 50.0, std::nullopt, {kOccNone}, std::nullopt},
      {"Occ.partial", 50.0, std::nullopt, {kOccPartial}, std::nullopt},
      {"Occ.heavy", 50.0, std::nullopt, {kOccHeavy}, std::nullopt},
      {"KITTI.easy", 40.0, std::nullopt, {kOccNone}, 0.15},
      {"KITTI.moderate", 25.0, std::nullopt, {kOccNone, kOccPartial}, 0.30},
      {"KITTI.hard", 25.0, std::nullopt, {kOccNone, kOccPartial, kOccHeavy}, 0.50},
  };
  return settings;
}

const EvalSetting &setting_by_name(const std::string &name) {
  auto lower = [](std::string s) {
    for (auto &ch : s)
      ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
  };
  const std::string key = lower(name);
  std::string known;
  for (const auto &s : standard_settings()) {
    if (lower(s.name) == key)
      return s;
    known += (known.empty() ? "" : ", ") + s.name;
  }
  throw ValidationError("unknown evaluation setting '" + name + "' (known: " + known + ")");
}

std::vector<GroundTruth> apply_setting(std::span<const GroundTruth> gts,
                                       const EvalSetting &setting) {
  std::vector<GroundTruth> out(gts.begin(), gts.end());
  for (auto &gt : out)
    if (!gt.ignore && !setting.admits(gt))
      gt.ignore = true;
  return out;
}

std::size_t evaluated_count(std::span<const GroundTruth> gts, const EvalSetting &setting) {
  return static_cast<std::size_t>(std::count_if(
      gts.begin(), gts.end(), [&](const auto &g) { return !g.ignore && setting.admits(g); }));
}

ImageMatch match_detections(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                            double iou_threshold) {
  ImageMatch m;
  m.detections.assign(dets.size(), DetVerdict::FalsePositive);
  m.assigned_gt.assign(dets.size(), std::nullopt);
  m.gts.resize(gts.size());
  for (std::size_t g = 0; g < gts.size(); ++g)
    m.gts[g] = gts[g].ignore ? GtStatus::Ignored : GtStatus::Missed;

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });

  for (std::size_t d : order) {
    double best_iou = -1.0;
    std::optional<std::size_t> best;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (m.gts[g] != GtStatus::Missed)
        continue;
      const double iou = jaccard(dets[d].box, gts[g].box);
      if (iou >= iou_threshold && iou > best_iou) {
        best_iou = iou;
        best = g;
      }
    }
    if (best) {
      m.gts[*best] = GtStatus::Matched;
      m.detections[d] = DetVerdict::TruePositive;
      m.assigned_gt[d] = best;
      continue;
    }
    best_iou = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (!gts[g].ignore)
        continue;
      const double iou = jaccard(dets[d].box, gts[g].box);
      if (iou >= iou_threshold && iou > best_iou) {
        best_iou = iou;
        best = g;
      }
    }
    if (best) {
      m.detections[d] = DetVerdict::Ignored;
      m.assigned_gt[d] = best;
    }
  }
  return m;
}

EvalCurve curve(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                const EvalSetting &setting, double iou_threshold,
                std::optional<std::size_t> num_images) {
  const std::vector<GroundTruth> filtered = apply_setting(gts, setting);
  EvalCurve c;
  c.evaluated_gts = static_cast<std::size_t>(
      std::count_if(filtered.begin(), filtered.end(), [](const auto &g) { return !g.ignore; }));
  if (c.evaluated_gts == 0)
    throw ValidationError("setting '" + setting.name +
                          "' leaves no ground truth to evaluate; miss rate is undefined");

  const ImageGroups det_groups = group_by_image(dets);
  const ImageGroups gt_groups = group_by_image(std::span<const GroundTruth>(filtered));
  std::vector<std::string> images = gt_groups.image_ids;
  for (const auto &id : det_groups.image_ids)
    if (!gt_groups.slot.contains(id))
      images.push_back(id);
  c.num_images = num_images.value_or(images.size());
  if (c.num_images == 0)
    throw ValidationError("evaluation needs at least one image");

  std::vector<kernels::ImageTask> tasks(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t d : det_groups.find(images[i]))
      tasks[i].dets.push_back(dets[d]);
    for (std::size_t g : gt_groups.find(images[i]))
      tasks[i].gts.push_back(filtered[g]);
  }
  std::vector<ImageMatch> matches(tasks.size());
  kernels::omp::match_images(tasks, iou_threshold, matches);

  struct Entry {
    double score;
    DetVerdict verdict;
  };
  std::vector<Entry> entries;
  entries.reserve(dets.size());
  for (std::size_t i = 0; i < tasks.size(); ++i)
    for (std::size_t d = 0; d < tasks[i].dets.size(); ++d)
      entries.push_back({tasks[i].dets[d].score, matches[i].detections[d]});
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry &a, const Entry &b) { return a.score > b.score; });

  const auto n_img = static_cast<double>(c.num_images);
  const auto n_gt = static_cast<double>(c.evaluated_gts);
  if (entries.empty()) {
    c.points.push_back({0.0, 1.0, std::numeric_limits<double>::infinity()});
    return c;
  }
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].verdict == DetVerdict::TruePositive)
      ++tp;
    else if (entries[i].verdict == DetVerdict::FalsePositive)
      ++fp;
    if (i + 1 == entries.size() || entries[i + 1].score != entries[i].score)
      c.points.push_back({static_cast<double>(fp) / n_img,
                          static_cast<double>(c.evaluated_gts - tp) / n_gt, entries[i].score});
  }
  return c;
}

std::array<double, 9> reference_fppi() {
  std::array<double, 9> refs{};
  for (int k = 0; k < 9; ++k)
    refs[static_cast<std::size_t>(k)] = std::pow(10.0, -2.0 + 0.25 * k);
  return refs;
}

double miss_rate_at(const EvalCurve &c, double fppi) {
  double miss = 1.0;
  for (const auto &p : c.points) {
    if (p.fppi > fppi)
      break;
    miss = p.miss_rate;
  }
  return miss;
}

double log_average_miss_rate(const EvalCurve &c) {
  double acc = 0.0;
  for (double ref : reference_fppi())
    acc += std::log(std::max(miss_rate_at(c, ref), kMissRateFloor));
  return std::exp(acc / 9.0);
}

AblationTable ablation_report(std::span<const AblationVariant> variants,
                              std::span<const GroundTruth> gts,
                              std::span<const EvalSetting> settings, double iou_threshold,
                              std::optional<std::size_t> num_images) {
  if (variants.empty())
    throw ValidationError("ablation report needs at least one variant");
  AblationTable t;
  for (const auto &s : settings)
    t.settings.push_back(s.name);
  for (const auto &v : variants) {
    t.variants.push_back(v.name);
    auto &row = t.lamr.emplace_back();
    for (const auto &s : settings)
      row.push_back(evaluated_count(gts, s) == 0
                        ? std::numeric_limits<double>::quiet_NaN()
                        : log_average_miss_rate(
                              curve(v.detections, gts, s, iou_threshold, num_images)));
  }
  return t;
}

} // namespace fdnn
