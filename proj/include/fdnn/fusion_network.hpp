// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#pragma once

#include "fdnn/fusion.hpp"
#include "fdnn/softlabel.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace fdnn {

struct FusionSample {
  std::vector<double> probs;
  SoftLabel label;
  double s_cg = 1.0;
};

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 30;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  double log_prob_floor = kDefaultLogProbFloor;
  std::size_t hidden1 = 500;
  std::size_t hidden2 = 500;

  void validate() const;
};

/// Small MLP that maps verifier log-probabilities to per-network exponents:
///
///   x = log(clamp(p, floor, 1))
///   h1 = relu(W1 x + b1), h2 = relu(W2 h1 + b2), z = W3 h2 + b3
///   w = K * softmax(z) * exp(log_scale)
///   fused_factor = exp(sum_k w_k x_k)
///
/// The K * softmax head keeps weights positive and summing to K * scale, and
/// the learnable scale lets that sum move away from K.
class FusionNetwork {
public:
  struct Output {
    FusionWeights weights;
    double fused_factor = 1.0;
  };

  /// Uniform(+-1/sqrt(fan_in)) initialization of every layer, seeded.
  FusionNetwork(std::size_t inputs, std::size_t hidden1, std::size_t hidden2, std::uint64_t seed);

  std::size_t input_width() const { return inputs_; }
  std::size_t hidden1() const { return hidden1_; }
  std::size_t hidden2() const { return hidden2_; }

  /// Throws ValidationError if probs.size() != input_width().
  Output forward(std::span<const double> probs, double floor = kDefaultLogProbFloor) const;

  /// Per-sample cross entropy of (q, 1 - q) against (ped, bg), where
  /// q = s_cg * fused_factor. Adds dLoss/dparam into grad when non-empty.
  double loss(const FusionSample &sample, double floor, std::span<double> grad = {}) const;

  /// Flat parameter vector: W1, b1, W2, b2, W3, b3, log_scale.
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  /// Head parameters (W3, b3), exposed so tests can pin the emitted weights.
  std::span<double> head_parameters();
  double &log_scale() { return params_.back(); }

  void save(std::ostream &os) const;
  static FusionNetwork load(std::istream &is);

  bool operator==(const FusionNetwork &) const = default;

private:
  FusionNetwork() = default;

  struct Forward {
    std::vector<double> x, h1, h2, softmax, weights;
    double log_factor = 0.0;
  };
  void run(std::span<const double> probs, double floor, Forward &f) const;
  void layout();

  std::size_t inputs_ = 0, hidden1_ = 0, hidden2_ = 0;
  std::size_t off_w1_ = 0, off_b1_ = 0, off_w2_ = 0, off_b2_ = 0, off_w3_ = 0, off_b3_ = 0;
  std::vector<double> params_;
};

/// Mean loss over a dataset.
double fusion_loss(const FusionNetwork &net, std::span<const FusionSample> data, double floor);

struct TrainReport {
  std::vector<double> epoch_loss; // [0] = before training, [e] = after epoch e
};

/// Mini-batch gradient descent on the mean cross entropy; deterministic given
/// cfg.seed. Throws ValidationError on empty data, RuntimeFailure on a
/// non-finite loss.
FusionNetwork train_fusion_network(std::span<const FusionSample> data, const TrainConfig &cfg,
                                   TrainReport *report = nullptr);

/// Dataset-average of the per-candidate weights the network emits.
FusionWeights mean_weights(const FusionNetwork &net, std::span<const std::vector<double>> probs,
                           double floor = kDefaultLogProbFloor);

} // namespace fdnn
