// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#pragma once

#include "fdnn/geometry.hpp"

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fdnn {

class FusionNetwork;

/// Per-candidate probabilities from the K verification networks.
struct ClassifierOpinion {
  std::string candidate_id;
  std::vector<double> probs;

  bool operator==(const ClassifierOpinion &) const = default;
};

/// Soft rejection: scale_k = max(p_k / t1, t2). A network at p_k = t1 leaves
/// the score alone; no network can push its factor below t2.
struct SoftRejectionParams {
  double t1 = 0.7;
  double t2 = 0.1;

  /// Requires 0 < t1 <= 1, 0 < t2 < 1, t2 < 1/t1.
  void validate() const;
};

/// Exponents of the weighted product s_cg * prod_k p_k^w_k.
struct FusionWeights {
  std::vector<double> w;

  /// Requires finite, non-negative entries.
  void validate() const;
};

inline constexpr double kDefaultLogProbFloor = 1e-6;

double soft_reject_scale(double p, const SoftRejectionParams &params);

/// s_cg * prod(scales). Not clamped; serialization clamps to [0,1].
double fuse_scores(double s_cg, std::span<const double> scales);

/// s_cg * exp(sum_k w_k log max(p_k, floor)).
double fuse_weighted(double s_cg, std::span<const double> probs, const FusionWeights &weights,
                     double floor = kDefaultLogProbFloor);

/// Same quantity evaluated as s_cg * prod_k max(p_k, floor)^w_k.
double fuse_weighted_product(double s_cg, std::span<const double> probs,
                             const FusionWeights &weights, double floor = kDefaultLogProbFloor);

/// Soft rejection over all K opinions of one candidate.
double fuse_soft_rejection(double s_cg, std::span<const double> probs,
                           const SoftRejectionParams &params);

using FusionModel =
    std::variant<SoftRejectionParams, FusionWeights, std::shared_ptr<const FusionNetwork>>;

/// Replaces every detection's score by its fused score. Opinions are joined
/// by candidate id; order and boxes are preserved. Throws ValidationError on a
/// missing or duplicate opinion, or on an arity mismatch with the model.
std::vector<Detection> fuse_batch(std::span<const Detection> detections,
                                  std::span<const ClassifierOpinion> opinions,
                                  const FusionModel &model,
                                  double floor = kDefaultLogProbFloor);

/// Concatenates per-network opinion lists (one list per network, each keyed
/// by candidate id) into K-wide opinions, in the order of the first list.
std::vector<ClassifierOpinion>
merge_opinions(std::span<const std::vector<ClassifierOpinion>> per_network);

} // namespace fdnn
