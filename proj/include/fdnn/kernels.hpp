// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#pragma once

// Data-parallel inner loops of the toolkit. Every kernel has two builds with
// identical signatures: `serial` is the reference, `omp` splits the outer
// loop across OpenMP threads. Each output element is written by exactly one
// iteration, so both builds produce bit-identical results.

#include "fdnn/evaluation.hpp"
#include "fdnn/fusion.hpp"
#include "fdnn/geometry.hpp"
#include "fdnn/segfusion.hpp"
#include "fdnn/softlabel.hpp"

#include <span>
#include <vector>

namespace fdnn {
class FusionNetwork;
}

namespace fdnn::kernels {

/// Row-major n x k view of per-candidate probabilities.
struct ProbMatrix {
  std::span<const double> values;
  std::size_t k = 0;

  std::size_t rows() const { return k == 0 ? 0 : values.size() / k; }
  std::span<const double> row(std::size_t i) const { return values.subspan(i * k, k); }
};

struct ImageTask {
  std::vector<Detection> dets;
  std::vector<GroundTruth> gts;
};

namespace serial {
#include "fdnn/kernels_decls.inc"
} // namespace serial

namespace omp {
#include "fdnn/kernels_decls.inc"
} // namespace omp

} // namespace fdnn::kernels
