// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "fdnn/fusion_network.hpp"

#include "fdnn/error.hpp"
#include "fdnn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

namespace fdnn {

namespace {

constexpr const char *kMagic = "fdnn-fusion-network";
constexpr int kFormatVersion = 1;

} // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0 && std::isfinite(learning_rate)))
    throw ValidationError("learning_rate must be positive");
  if (epochs < 0)
    throw ValidationError("epochs must be non-negative");
  if (batch_size < 1)
    throw ValidationError("batch_size must be at least 1");
  if (!(log_prob_floor > 0.0 && log_prob_floor < 1.0))
    throw ValidationError("log_prob_floor must lie in (0, 1)");
  if (hidden1 < 1 || hidden2 < 1)
    throw ValidationError("hidden layer widths must be at least 1");
}

void FusionNetwork::layout() {
  off_w1_ = 0;
  off_b1_ = off_w1_ + hidden1_ * inputs_;
  off_w2_ = off_b1_ + hidden1_;
  off_b2_ = off_w2_ + hidden2_ * hidden1_;
  off_w3_ = off_b2_ + hidden2_;
  off_b3_ = off_w3_ + inputs_ * hidden2_;
  params_.assign(off_b3_ + inputs_ + 1, 0.0);
}

FusionNetwork::FusionNetwork(std::size_t inputs, std::size_t hidden1, std::size_t hidden2,
                             std::uint64_t seed)
    : inputs_(inputs), hidden1_(hidden1), hidden2_(hidden2) {
  if (inputs < 1 || hidden1 < 1 || hidden2 < 1)
    throw ValidationError("fusion network widths must be at least 1");
  layout();
  Xorshift64Star rng(seed);
  auto init = [&](std::size_t begin, std::size_t end, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = begin; i < end; ++i)
      params_[i] = rng.uniform(-bound, bound);
  };
  init(off_w1_, off_w2_, inputs_);  // W1, b1
  init(off_w2_, off_w3_, hidden1_); // W2, b2
  init(off_w3_, params_.size() - 1, hidden2_);
  params_.back() = 0.0; // scale exp(0) = 1
}

std::span<double> FusionNetwork::head_parameters() {
  return std::span<double>(params_).subspan(off_w3_, inputs_ * hidden2_ + inputs_);
}

void FusionNetwork::run(std::span<const double> probs, double floor, Forward &f) const {
  if (probs.size() != inputs_)
    throw ValidationError("fusion network expects " + std::to_string(inputs_) +
                          " probabilities, got " + std::to_string(probs.size()));
  const double *p = params_.data();
  f.x.resize(inputs_);
  for (std::size_t k = 0; k < inputs_; ++k)
    f.x[k] = std::log(std::clamp(probs[k], floor, 1.0));

  f.h1.resize(hidden1_);
  for (std::size_t j = 0; j < hidden1_; ++j) {
    const double *row = p + off_w1_ + j * inputs_;
    double a = p[off_b1_ + j];
    for (std::size_t k = 0; k < inputs_; ++k)
      a += row[k] * f.x[k];
    f.h1[j] = a > 0.0 ? a : 0.0;
  }
  f.h2.resize(hidden2_);
  for (std::size_t j = 0; j < hidden2_; ++j) {
    const double *row = p + off_w2_ + j * hidden1_;
    double a = p[off_b2_ + j];
    for (std::size_t i = 0; i < hidden1_; ++i)
      a += row[i] * f.h1[i];
    f.h2[j] = a > 0.0 ? a : 0.0;
  }
  std::vector<double> z(inputs_);
  for (std::size_t k = 0; k < inputs_; ++k) {
    const double *row = p + off_w3_ + k * hidden2_;
    double a = p[off_b3_ + k];
    for (std::size_t i = 0; i < hidden2_; ++i)
      a += row[i] * f.h2[i];
    z[k] = a;
  }
  f.softmax = softmax(z);
  const double scale = static_cast<double>(inputs_) * std::exp(params_.back());
  f.weights.resize(inputs_);
  f.log_factor = 0.0;
  for (std::size_t k = 0; k < inputs_; ++k) {
    f.weights[k] = scale * f.softmax[k];
    f.log_factor += f.weights[k] * f.x[k];
  }
}

FusionNetwork::Output FusionNetwork::forward(std::span<const double> probs, double floor) const {
  Forward f;
  run(probs, floor, f);
  return {FusionWeights{std::move(f.weights)}, std::exp(f.log_factor)};
}

double FusionNetwork::loss(const FusionSample &sample, double floor, std::span<double> grad) const {
  Forward f;
  run(sample.probs, floor, f);

  static const double log_clamp = std::log(kProbabilityClamp);
  const double log_q = std::log(std::max(sample.s_cg, kProbabilityClamp)) + f.log_factor;
  const double q = std::exp(log_q);
  const double one_minus_q = -std::expm1(log_q);

  double value = 0.0;
  double d_logfactor = 0.0;
  if (sample.label.ped > 0.0) {
    value -= sample.label.ped * std::max(log_q, log_clamp);
    if (log_q > log_clamp)
      d_logfactor -= sample.label.ped;
  }
  if (sample.label.bg > 0.0) {
    value -= sample.label.bg * std::log(std::max(one_minus_q, kProbabilityClamp));
    if (one_minus_q > kProbabilityClamp)
      d_logfactor += sample.label.bg * q / one_minus_q;
  }
  if (grad.empty())
    return value;
  if (grad.size() != params_.size())
    throw ValidationError("gradient buffer size does not match parameter count");

  const double *p = params_.data();
  double *g = grad.data();

  // through log_factor = sum_k w_k x_k
  std::vector<double> d_w(inputs_);
  double sigma_dot = 0.0;
  double d_log_scale = 0.0;
  for (std::size_t k = 0; k < inputs_; ++k) {
    d_w[k] = d_logfactor * f.x[k];
    sigma_dot += d_w[k] * f.softmax[k];
    d_log_scale += d_w[k] * f.weights[k];
  }
  g[params_.size() - 1] += d_log_scale;

  // through w = K * scale * softmax(z)
  const double scale = static_cast<double>(inputs_) * std::exp(params_.back());
  std::vector<double> d_z(inputs_);
  for (std::size_t k = 0; k < inputs_; ++k)
    d_z[k] = scale * f.softmax[k] * (d_w[k] - sigma_dot);

  std::vector<double> d_h2(hidden2_, 0.0);
  for (std::size_t k = 0; k < inputs_; ++k) {
    const double *row = p + off_w3_ + k * hidden2_;
    double *grow = g + off_w3_ + k * hidden2_;
    for (std::size_t i = 0; i < hidden2_; ++i) {
      grow[i] += d_z[k] * f.h2[i];
      d_h2[i] += row[i] * d_z[k];
    }
    g[off_b3_ + k] += d_z[k];
  }

  std::vector<double> d_h1(hidden1_, 0.0);
  for (std::size_t j = 0; j < hidden2_; ++j) {
    if (f.h2[j] <= 0.0)
      continue;
    const double d_a = d_h2[j];
    const double *row = p + off_w2_ + j * hidden1_;
    double *grow = g + off_w2_ + j * hidden1_;
    for (std::size_t i = 0; i < hidden1_; ++i) {
      grow[i] += d_a * f.h1[i];
      d_h1[i] += row[i] * d_a;
    }
    g[off_b2_ + j] += d_a;
  }

  for (std::size_t j = 0; j < hidden1_; ++j) {
    if (f.h1[j] <= 0.0)
      continue;
    const double d_a = d_h1[j];
    double *grow = g + off_w1_ + j * inputs_;
    for (std::size_t k = 0; k < inputs_; ++k)
      grow[k] += d_a * f.x[k];
    g[off_b1_ + j] += d_a;
  }
  return value;
}

void FusionNetwork::save(std::ostream &os) const {
  os << kMagic << ' ' << kFormatVersion << '\n';
  os << inputs_ << ' ' << hidden1_ << ' ' << hidden2_ << '\n';
  char buf[40];
  for (double v : params_) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf << '\n';
  }
}

FusionNetwork FusionNetwork::load(std::istream &is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != kMagic)
    throw ValidationError("not a fusion network file");
  if (version != kFormatVersion)
    throw ValidationError("unsupported fusion network format version " + std::to_string(version));
  FusionNetwork net;
  if (!(is >> net.inputs_ >> net.hidden1_ >> net.hidden2_) || net.inputs_ < 1 ||
      net.hidden1_ < 1 || net.hidden2_ < 1)
    throw ValidationError("fusion network file: bad layer widths");
  net.layout();
  std::string token;
  for (std::size_t i = 0; i < net.params_.size(); ++i) {
    if (!(is >> token))
      throw ValidationError("fusion network file: expected " + std::to_string(net.params_.size()) +
                            " parameters, found " + std::to_string(i));
    char *end = nullptr;
    net.params_[i] = std::strtod(token.c_str(), &end);
    if (*end != '\0' || !std::isfinite(net.params_[i]))
      throw ValidationError("fusion network file: bad parameter '" + token + "'");
  }
  if (is >> token)
    throw ValidationError("fusion network file: trailing data");
  return net;
}

double fusion_loss(const FusionNetwork &net, std::span<const FusionSample> data, double floor) {
  if (data.empty())
    return 0.0;
  double total = 0.0;
  for (const auto &s : data)
    total += net.loss(s, floor);
  return total / static_cast<double>(data.size());
}

FusionNetwork train_fusion_network(std::span<const FusionSample> data, const TrainConfig &cfg,
                                   TrainReport *report) {
  cfg.validate();
  if (data.empty())
    throw ValidationError("fusion training data is empty");
  const std::size_t k = data.front().probs.size();
  for (const auto &s : data)
    if (s.probs.size() != k)
      throw ValidationError("fusion training samples disagree on the number of networks");

  FusionNetwork net(k, cfg.hidden1, cfg.hidden2, cfg.seed);
  auto check = [](double loss, int epoch) {
    if (!std::isfinite(loss))
      throw RuntimeFailure("fusion training loss became non-finite at epoch " +
                           std::to_string(epoch));
    return loss;
  };
  if (report)
    report->epoch_loss = {check(fusion_loss(net, data, cfg.log_prob_floor), 0)};

  Xorshift64Star shuffle_rng(cfg.seed ^ 0x5DEECE66DULL);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> grad(net.parameters().size());

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<std::size_t>(shuffle_rng.uniform_int(
                                  0, static_cast<std::int64_t>(i) - 1))]);

    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(begin + cfg.batch_size, order.size());
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = begin; i < end; ++i)
        net.loss(data[order[i]], cfg.log_prob_floor, grad);
      const double step = cfg.learning_rate / static_cast<double>(end - begin);
      auto params = net.parameters();
      for (std::size_t j = 0; j < params.size(); ++j) {
        params[j] -= step * grad[j];
        if (!std::isfinite(params[j]))
          throw RuntimeFailure("fusion training diverged at epoch " + std::to_string(epoch));
      }
      if (!std::isfinite(std::exp(params.back())))
        throw RuntimeFailure("fusion weight scale overflowed at epoch " + std::to_string(epoch));
    }

    const double loss = check(fusion_loss(net, data, cfg.log_prob_floor), epoch);
    if (report)
      report->epoch_loss.push_back(loss);
  }
  return net;
}

FusionWeights mean_weights(const FusionNetwork &net, std::span<const std::vector<double>> probs,
                           double floor) {
  FusionWeights mean{std::vector<double>(net.input_width(), 0.0)};
  if (probs.empty())
    return mean;
  for (const auto &p : probs) {
    const auto out = net.forward(p, floor);
    for (std::size_t k = 0; k < mean.w.size(); ++k)
      mean.w[k] += out.weights.w[k];
  }
  for (double &v : mean.w)
    v /= static_cast<double>(probs.size());
  return mean;
}

} // namespace fdnn
