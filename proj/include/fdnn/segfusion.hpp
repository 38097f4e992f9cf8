// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#pragma once

#include "fdnn/geometry.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace fdnn {

/// Binary foreground raster, row-major, values in {0, 1}.
struct SegMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  SegMask() = default;
  SegMask(int w, int h);

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  void set(int x, int y, std::uint8_t v) { pixels[static_cast<std::size_t>(y) * width + x] = v; }

  /// Zero outside the raster.
  std::uint8_t sample(int x, int y) const {
    return (x < 0 || y < 0 || x >= width || y >= height) ? 0 : at(x, y);
  }

  bool operator==(const SegMask &) const = default;
};

using MaskStore = std::map<std::string, SegMask>;

/// Non-negative weight matrix summing to 1, row-major.
struct Kernel {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> weights;

  double at(std::size_t r, std::size_t c) const { return weights[r * cols + c]; }

  bool operator==(const Kernel &) const = default;
};

inline constexpr std::size_t kDefaultKernelRows = 64;
inline constexpr std::size_t kDefaultKernelCols = 32;

/// True when the box overlaps the raster by a positive area.
bool intersects_image(const BoundingBox &box, const SegMask &mask);

/// Nearest-neighbour resample of the mask under box onto a rows x cols grid.
/// Cell (r, c) reads the pixel containing the point
/// (x + (c + 0.5) w / cols, y + (r + 0.5) h / rows). Outside pixels read 0.
std::vector<double> resample_crop(const BoundingBox &box, const SegMask &mask, std::size_t rows,
                                  std::size_t cols);

/// Mean of the resampled gt crops, normalized to sum 1. Throws
/// ValidationError on an empty gt list, a missing mask or a box outside its
/// image; RuntimeFailure when every crop is empty.
Kernel estimate_kernel(std::span<const GroundTruth> gts, const MaskStore &masks,
                       std::size_t rows = kDefaultKernelRows,
                       std::size_t cols = kDefaultKernelCols);

/// sum over cells of resampled mask * kernel; in [0, 1].
double seg_score(const BoundingBox &box, const SegMask &mask, const Kernel &kernel);

inline double fuse_seg(double s, double seg) { return s * seg; }

/// Constants of the earlier fixed segmentation rule.
struct LegacySegParams {
  double a_ss = 4.0;
  double b_ss = 0.35;
  double accept_threshold = 0.2;
};

/// s if fraction > accept_threshold, else s * max(fraction * a_ss, b_ss).
double legacy_seg_fuse(double s, double overlap_fraction, const LegacySegParams &params = {});

/// Foreground pixels under the box over the box's pixel count. A pixel
/// belongs to the box when its centre lies in [x, x+w) x [y, y+h); pixels
/// outside the raster count as background.
double mask_overlap_fraction(const BoundingBox &box, const SegMask &mask);

/// Keeps the segmentation-only detections that overlap some candidate
/// generator detection of the same image with positive area.
std::vector<Detection> suppress_ss_only(std::span<const Detection> ss_detections,
                                        std::span<const Detection> cg_detections);

/// Multiplies each detection's score by its kernel score.
std::vector<Detection> seg_fuse_detections(std::span<const Detection> dets, const MaskStore &masks,
                                           const Kernel &kernel);

std::vector<Detection> legacy_seg_fuse_detections(std::span<const Detection> dets,
                                                  const MaskStore &masks,
                                                  const LegacySegParams &params = {});

// Codecs. PGM: binary P5 or plain P2, any maxval, nonzero = foreground.
SegMask read_pgm(std::istream &is, const std::string &source = "<pgm>");
SegMask read_pgm_file(const std::string &path);
void write_pgm(std::ostream &os, const SegMask &mask);

/// Text kernel: header "rows cols", then one line of weights per row.
Kernel read_kernel(std::istream &is, const std::string &source = "<kernel>");
void write_kernel(std::ostream &os, const Kernel &kernel);

/// Loads every <image_id>.pgm in a directory.
MaskStore load_mask_directory(const std::string &dir);

} // namespace fdnn
