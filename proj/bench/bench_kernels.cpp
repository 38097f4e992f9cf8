// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

// Serial reference kernels against their OpenMP builds on a synthetic corpus.
// Run with OMP_NUM_THREADS set to the thread count of interest.

#include "fdnn/fusion_network.hpp"
#include "fdnn/kernels.hpp"
#include "fdnn/synth.hpp"

#include <benchmark/benchmark.h>

#include <map>

using namespace fdnn;

namespace {

struct Workload {
  SynthCorpus corpus;
  std::vector<double> s_cg, probs;
  std::vector<BoundingBox> boxes;
  std::vector<const SegMask *> masks;
  ImageGroups gt_groups;
  std::vector<kernels::ImageTask> tasks;
  Kernel kernel;

  Workload() {
    SynthConfig cfg;
    cfg.num_images = 400;
    cfg.fp_rate = 20.0;
    cfg.seed = 99;
    corpus = generate(cfg);
    for (std::size_t i = 0; i < corpus.cg_detections.size(); ++i) {
      const auto &d = corpus.cg_detections[i];
      s_cg.push_back(d.score);
      boxes.push_back(d.box);
      masks.push_back(&corpus.masks.at(d.image_id));
      for (const auto &ops : corpus.opinions)
        probs.push_back(ops[i].probs[0]);
    }
    gt_groups = group_by_image(std::span<const GroundTruth>(corpus.gts));
    std::map<std::string, std::size_t> slot;
    for (std::size_t i = 0; i < corpus.image_ids.size(); ++i)
      slot[corpus.image_ids[i]] = i;
    tasks.resize(corpus.image_ids.size());
    for (const auto &d : corpus.cg_detections)
      tasks[slot[d.image_id]].dets.push_back(d);
    for (const auto &g : corpus.gts)
      tasks[slot[g.image_id]].gts.push_back(g);
    kernel = estimate_kernel(corpus.gts, corpus.masks);
  }

  kernels::ProbMatrix matrix() const { return {probs, corpus.opinions.size()}; }
};

const Workload &workload() {
  static const Workload w;
  return w;
}

template <bool Omp> void BM_BestOverlaps(benchmark::State &state) {
  const auto &w = workload();
  std::vector<OverlapHit> out(w.corpus.cg_detections.size());
  for (auto _ : state) {
    if constexpr (Omp)
      kernels::omp::best_overlaps(w.corpus.cg_detections, w.corpus.gts, w.gt_groups, out);
    else
      kernels::serial::best_overlaps(w.corpus.cg_detections, w.corpus.gts, w.gt_groups, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.size()));
}

template <bool Omp> void BM_NetworkScores(benchmark::State &state) {
  const auto &w = workload();
  const FusionNetwork net(2, 64, 64, 1);
  std::vector<double> out(w.s_cg.size());
  for (auto _ : state) {
    if constexpr (Omp)
      kernels::omp::network_scores(w.s_cg, w.matrix(), net, kDefaultLogProbFloor, out);
    else
      kernels::serial::network_scores(w.s_cg, w.matrix(), net, kDefaultLogProbFloor, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.size()));
}

template <bool Omp> void BM_WeightedScores(benchmark::State &state) {
  const auto &w = workload();
  const FusionWeights weights{{1.11, 2.22}};
  std::vector<double> out(w.s_cg.size());
  for (auto _ : state) {
    if constexpr (Omp)
      kernels::omp::weighted_scores(w.s_cg, w.matrix(), weights, kDefaultLogProbFloor, out);
    else
      kernels::serial::weighted_scores(w.s_cg, w.matrix(), weights, kDefaultLogProbFloor, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.size()));
}

template <bool Omp> void BM_SegScores(benchmark::State &state) {
  const auto &w = workload();
  std::vector<double> out(w.boxes.size());
  for (auto _ : state) {
    if constexpr (Omp)
      kernels::omp::seg_scores(w.boxes, w.masks, w.kernel, out);
    else
      kernels::serial::seg_scores(w.boxes, w.masks, w.kernel, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.size()));
}

template <bool Omp> void BM_OverlapFractions(benchmark::State &state) {
  const auto &w = workload();
  std::vector<double> out(w.boxes.size());
  for (auto _ : state) {
    if constexpr (Omp)
      kernels::omp::overlap_fractions(w.boxes, w.masks, out);
    else
      kernels::serial::overlap_fractions(w.boxes, w.masks, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.size()));
}

template <bool Omp> void BM_MatchImages(benchmark::State &state) {
  const auto &w = workload();
  std::vector<ImageMatch> out(w.tasks.size());
  for (auto _ : state) {
    if constexpr (Omp)
      kernels::omp::match_images(w.tasks, 0.5, out);
    else
      kernels::serial::match_images(w.tasks, 0.5, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.size()));
}

} // namespace

BENCHMARK(BM_BestOverlaps<false>)->Name("best_overlaps/serial");
BENCHMARK(BM_BestOverlaps<true>)->Name("best_overlaps/omp");
BENCHMARK(BM_WeightedScores<false>)->Name("weighted_scores/serial");
BENCHMARK(BM_WeightedScores<true>)->Name("weighted_scores/omp");
BENCHMARK(BM_NetworkScores<false>)->Name("network_scores/serial");
BENCHMARK(BM_NetworkScores<true>)->Name("network_scores/omp");
BENCHMARK(BM_SegScores<false>)->Name("seg_scores/serial");
BENCHMARK(BM_SegScores<true>)->Name("seg_scores/omp");
BENCHMARK(BM_OverlapFractions<false>)->Name("overlap_fractions/serial");
BENCHMARK(BM_OverlapFractions<true>)->Name("overlap_fractions/omp");
BENCHMARK(BM_MatchImages<false>)->Name("match_images/serial");
BENCHMARK(BM_MatchImages<true>)->Name("match_images/omp");

BENCHMARK_MAIN();
