// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "fdnn/fusion.hpp"

#include "fdnn/error.hpp"
#include "fdnn/fusion_network.hpp"
#include "fdnn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace fdnn {

void SoftRejectionParams::validate() const {
  if (!(t1 > 0.0 && t1 <= 1.0))
    throw ValidationError("soft rejection t1 must lie in (0, 1]");
  if (!(t2 > 0.0 && t2 < 1.0))
    throw ValidationError("soft rejection t2 must lie in (0, 1)");
  if (!(t2 < 1.0 / t1))
    throw ValidationError("soft rejection requires t2 < 1/t1");
}

void FusionWeights::validate() const {
  for (double v : w)
    if (!(std::isfinite(v) && v >= 0.0))
      throw ValidationError("fusion weights must be finite and non-negative");
}

double soft_reject_scale(double p, const SoftRejectionParams &params) {
  return std::max(p * (1.0 / params.t1), params.t2);
}

double fuse_scores(double s_cg, std::span<const double> scales) {
  double s = s_cg;
  for (double k : scales)
    s *= k;
  return s;
}

double fuse_weighted(double s_cg, std::span<const double> probs, const FusionWeights &weights,
                     double floor) {
  if (probs.size() != weights.w.size())
    throw ValidationError("fusion weights expect " + std::to_string(weights.w.size()) +
                          " probabilities, got " + std::to_string(probs.size()));
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k)
    acc += weights.w[k] * std::log(std::clamp(probs[k], floor, 1.0));
  return s_cg * std::exp(acc);
}

double fuse_weighted_product(double s_cg, std::span<const double> probs,
                             const FusionWeights &weights, double floor) {
  if (probs.size() != weights.w.size())
    throw ValidationError("fusion weights expect " + std::to_string(weights.w.size()) +
                          " probabilities, got " + std::to_string(probs.size()));
  double s = s_cg;
  for (std::size_t k = 0; k < probs.size(); ++k)
    s *= std::pow(std::clamp(probs[k], floor, 1.0), weights.w[k]);
  return s;
}

double fuse_soft_rejection(double s_cg, std::span<const double> probs,
                           const SoftRejectionParams &params) {
  double s = s_cg;
  for (double p : probs)
    s *= soft_reject_scale(p, params);
  return s;
}

namespace {

std::size_t model_arity(const FusionModel &model) {
  if (const auto *w = std::get_if<FusionWeights>(&model))
    return w->w.size();
  if (const auto *net = std::get_if<std::shared_ptr<const FusionNetwork>>(&model))
    return (*net)->input_width();
  return 0; // soft rejection accepts any K
}

} // namespace

std::vector<Detection> fuse_batch(std::span<const Detection> detections,
                                  std::span<const ClassifierOpinion> opinions,
                                  const FusionModel &model, double floor) {
  if (detections.empty())
    return {};
  if (const auto *net = std::get_if<std::shared_ptr<const FusionNetwork>>(&model); net && !*net)
    throw ValidationError("fusion network model is empty");

  std::unordered_map<std::string, std::size_t> by_id;
  by_id.reserve(opinions.size());
  for (std::size_t i = 0; i < opinions.size(); ++i)
    if (!by_id.emplace(opinions[i].candidate_id, i).second)
      throw ValidationError("duplicate opinion for candidate '" + opinions[i].candidate_id + "'");

  const std::size_t arity = model_arity(model);
  std::size_t k_width = 0;
  std::vector<double> s_cg(detections.size());
  std::vector<double> probs;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    auto it = by_id.find(detections[i].id);
    if (it == by_id.end())
      throw ValidationError("no opinion for candidate '" + detections[i].id + "'");
    const auto &p = opinions[it->second].probs;
    if (i == 0) {
      k_width = p.size();
      if (k_width == 0)
        throw ValidationError("opinion for candidate '" + detections[i].id + "' is empty");
      if (arity != 0 && arity != k_width)
        throw ValidationError("fusion model expects " + std::to_string(arity) +
                              " networks, opinions carry " + std::to_string(k_width));
      probs.reserve(detections.size() * k_width);
    } else if (p.size() != k_width) {
      throw ValidationError("opinion for candidate '" + detections[i].id + "' has " +
                            std::to_string(p.size()) + " probabilities, expected " +
                            std::to_string(k_width));
    }
    s_cg[i] = detections[i].score;
    probs.insert(probs.end(), p.begin(), p.end());
  }

  const kernels::ProbMatrix matrix{probs, k_width};
  std::vector<double> fused(detections.size());
  if (const auto *sr = std::get_if<SoftRejectionParams>(&model)) {
    sr->validate();
    kernels::omp::soft_rejection_scores(s_cg, matrix, *sr, fused);
  } else if (const auto *w = std::get_if<FusionWeights>(&model)) {
    w->validate();
    kernels::omp::weighted_scores(s_cg, matrix, *w, floor, fused);
  } else {
    kernels::omp::network_scores(s_cg, matrix, *std::get<2>(model), floor, fused);
  }

  std::vector<Detection> out(detections.begin(), detections.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i].score = fused[i];
  return out;
}

std::vector<ClassifierOpinion>
merge_opinions(std::span<const std::vector<ClassifierOpinion>> per_network) {
  if (per_network.empty())
    return {};
  std::vector<ClassifierOpinion> merged(per_network[0].begin(), per_network[0].end());
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < merged.size(); ++i)
    if (!by_id.emplace(merged[i].candidate_id, i).second)
      throw ValidationError("duplicate opinion for candidate '" + merged[i].candidate_id + "'");

  for (std::size_t n = 1; n < per_network.size(); ++n) {
    const auto &list = per_network[n];
    if (list.size() != merged.size())
      throw ValidationError("opinion list " + std::to_string(n) + " covers " +
                            std::to_string(list.size()) + " candidates, expected " +
                            std::to_string(merged.size()));
    std::vector<bool> seen(merged.size(), false);
    for (const auto &op : list) {
      auto it = by_id.find(op.candidate_id);
      if (it == by_id.end())
        throw ValidationError("opinion list " + std::to_string(n) + " has unknown candidate '" +
                              op.candidate_id + "'");
      if (seen[it->second])
        throw ValidationError("duplicate opinion for candidate '" + op.candidate_id + "'");
      seen[it->second] = true;
      auto &dst = merged[it->second].probs;
      dst.insert(dst.end(), op.probs.begin(), op.probs.end());
    }
  }
  return merged;
}

} // namespace fdnn
