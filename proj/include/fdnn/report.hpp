// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#pragma once

#include "fdnn/evaluation.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <utility>

namespace fdnn {

/// Fixed-width table, L-AMR in percent with two decimals.
void write_ablation_text(std::ostream &os, const AblationTable &table);

/// variant,setting,lamr (fraction, 9 significant digits).
void write_ablation_csv(std::ostream &os, const AblationTable &table);

/// threshold,fppi,miss_rate
void write_curve_csv(std::ostream &os, const EvalCurve &curve);

using NamedCurve = std::pair<std::string, EvalCurve>;

/// Log-log miss rate vs FPPI plot over FPPI [1e-3, 1e1], the usual
/// presentation of these curves. Legend entries carry the L-AMR.
void write_curves_svg(std::ostream &os, std::span<const NamedCurve> curves,
                      const std::string &title);

} // namespace fdnn
