// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "fdnn/segfusion.hpp"

#include "fdnn/error.hpp"
#include "fdnn/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fdnn {

SegMask::SegMask(int w, int h) : width(w), height(h) {
  if (w < 1 || h < 1)
    throw ValidationError("mask dimensions must be at least 1x1");
  pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
}

bool intersects_image(const BoundingBox &box, const SegMask &mask) {
  return box.x < mask.width && box.right() > 0.0 && box.y < mask.height && box.bottom() > 0.0;
}

std::vector<double> resample_crop(const BoundingBox &box, const SegMask &mask, std::size_t rows,
                                  std::size_t cols) {
  std::vector<double> out(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const int py = static_cast<int>(std::floor(box.y + (static_cast<double>(r) + 0.5) * box.h /
                                                           static_cast<double>(rows)));
    for (std::size_t c = 0; c < cols; ++c) {
      const int px = static_cast<int>(std::floor(box.x + (static_cast<double>(c) + 0.5) * box.w /
                                                             static_cast<double>(cols)));
      out[r * cols + c] = mask.sample(px, py);
    }
  }
  return out;
}

namespace {

const SegMask &mask_for(const MaskStore &masks, const std::string &image_id) {
  auto it = masks.find(image_id);
  if (it == masks.end())
    throw ValidationError("no segmentation mask for image '" + image_id + "'");
  return it->second;
}

void check_inside(const BoundingBox &box, const SegMask &mask) {
  if (!intersects_image(box, mask))
    throw ValidationError("bounding box lies entirely outside its image");
}

} // namespace

Kernel estimate_kernel(std::span<const GroundTruth> gts, const MaskStore &masks, std::size_t rows,
                       std::size_t cols) {
  if (gts.empty())
    throw ValidationError("kernel estimation needs at least one ground-truth box");
  if (rows < 1 || cols < 1)
    throw ValidationError("kernel size must be at least 1x1");

  std::vector<BoundingBox> boxes;
  std::vector<const SegMask *> crop_masks;
  boxes.reserve(gts.size());
  crop_masks.reserve(gts.size());
  for (const auto &gt : gts) {
    const SegMask &m = mask_for(masks, gt.image_id);
    check_inside(gt.box, m);
    boxes.push_back(gt.box);
    crop_masks.push_back(&m);
  }

  const std::size_t cells = rows * cols;
  std::vector<double> crops(boxes.size() * cells);
  kernels::omp::resample_crops(boxes, crop_masks, rows, cols, crops);

  // fixed summation order keeps the result independent of the thread count
  Kernel k{rows, cols, std::vector<double>(cells, 0.0)};
  for (std::size_t n = 0; n < boxes.size(); ++n)
    for (std::size_t i = 0; i < cells; ++i)
      k.weights[i] += crops[n * cells + i];
  double total = 0.0;
  for (double &v : k.weights) {
    v /= static_cast<double>(boxes.size());
    total += v;
  }
  if (total <= 0.0)
    throw RuntimeFailure("kernel estimation: every ground-truth crop is background");
  for (double &v : k.weights)
    v /= total;
  return k;
}

double seg_score(const BoundingBox &box, const SegMask &mask, const Kernel &kernel) {
  check_inside(box, mask);
  double s = 0.0;
  for (std::size_t r = 0; r < kernel.rows; ++r) {
    const int py = static_cast<int>(std::floor(box.y + (static_cast<double>(r) + 0.5) * box.h /
                                                           static_cast<double>(kernel.rows)));
    for (std::size_t c = 0; c < kernel.cols; ++c) {
      const int px = static_cast<int>(std::floor(
          box.x + (static_cast<double>(c) + 0.5) * box.w / static_cast<double>(kernel.cols)));
      if (mask.sample(px, py))
        s += kernel.at(r, c);
    }
  }
  return std::min(s, 1.0);
}

double legacy_seg_fuse(double s, double overlap_fraction, const LegacySegParams &params) {
  if (overlap_fraction > params.accept_threshold)
    return s;
  return s * std::max(overlap_fraction * params.a_ss, params.b_ss);
}

double mask_overlap_fraction(const BoundingBox &box, const SegMask &mask) {
  check_inside(box, mask);
  auto first = [](double lo) { return static_cast<long>(std::ceil(lo - 0.5)); };
  long x0 = first(box.x), x1 = first(box.right()) - 1;
  long y0 = first(box.y), y1 = first(box.bottom()) - 1;
  if (x1 < x0) // thinner than a pixel: use the pixel holding the centre
    x0 = x1 = static_cast<long>(std::floor(box.center_x()));
  if (y1 < y0)
    y0 = y1 = static_cast<long>(std::floor(box.center_y()));
  std::size_t fg = 0;
  for (long y = y0; y <= y1; ++y)
    for (long x = x0; x <= x1; ++x)
      fg += mask.sample(static_cast<int>(x), static_cast<int>(y));
  const auto total = static_cast<double>((x1 - x0 + 1) * (y1 - y0 + 1));
  return static_cast<double>(fg) / total;
}

std::vector<Detection> suppress_ss_only(std::span<const Detection> ss_detections,
                                        std::span<const Detection> cg_detections) {
  const ImageGroups cg_groups = group_by_image(cg_detections);
  std::vector<Detection> kept;
  for (const auto &ss : ss_detections) {
    for (std::size_t i : cg_groups.find(ss.image_id)) {
      if (intersection_area(ss.box, cg_detections[i].box) > 0.0) {
        kept.push_back(ss);
        break;
      }
    }
  }
  return kept;
}

namespace {

std::vector<const SegMask *> masks_for(std::span<const Detection> dets, const MaskStore &masks,
                                       std::vector<BoundingBox> &boxes) {
  std::vector<const SegMask *> out;
  out.reserve(dets.size());
  boxes.reserve(dets.size());
  for (const auto &d : dets) {
    const SegMask &m = mask_for(masks, d.image_id);
    check_inside(d.box, m);
    out.push_back(&m);
    boxes.push_back(d.box);
  }
  return out;
}

} // namespace

std::vector<Detection> seg_fuse_detections(std::span<const Detection> dets, const MaskStore &masks,
                                           const Kernel &kernel) {
  std::vector<BoundingBox> boxes;
  const auto ptrs = masks_for(dets, masks, boxes);
  std::vector<double> scores(dets.size());
  kernels::omp::seg_scores(boxes, ptrs, kernel, scores);
  std::vector<Detection> out(dets.begin(), dets.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i].score = fuse_seg(out[i].score, scores[i]);
  return out;
}

std::vector<Detection> legacy_seg_fuse_detections(std::span<const Detection> dets,
                                                  const MaskStore &masks,
                                                  const LegacySegParams &params) {
  std::vector<BoundingBox> boxes;
  const auto ptrs = masks_for(dets, masks, boxes);
  std::vector<double> fractions(dets.size());
  kernels::omp::overlap_fractions(boxes, ptrs, fractions);
  std::vector<Detection> out(dets.begin(), dets.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i].score = legacy_seg_fuse(out[i].score, fractions[i], params);
  return out;
}

// ---------------------------------------------------------------- codecs

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream &is, const std::string &source) {
  std::string tok;
  int ch;
  while ((ch = is.get()) != EOF) {
    if (ch == '#') {
      while ((ch = is.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty())
        return tok;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  if (tok.empty())
    throw ValidationError(source + ": truncated PGM header");
  return tok;
}

long pgm_int(std::istream &is, const std::string &source, const char *what) {
  const std::string tok = pgm_token(is, source);
  char *end = nullptr;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (*end != '\0' || v < 1)
    throw ValidationError(source + ": bad PGM " + what + " '" + tok + "'");
  return v;
}

} // namespace

SegMask read_pgm(std::istream &is, const std::string &source) {
  const std::string magic = pgm_token(is, source);
  if (magic != "P5" && magic != "P2")
    throw ValidationError(source + ": not a PGM file (magic '" + magic + "')");
  const long w = pgm_int(is, source, "width");
  const long h = pgm_int(is, source, "height");
  const long maxval = pgm_int(is, source, "maxval");
  if (maxval > 65535)
    throw ValidationError(source + ": PGM maxval above 65535");
  SegMask mask(static_cast<int>(w), static_cast<int>(h));
  const std::size_t n = mask.pixels.size();
  if (magic == "P5") {
    // pgm_token consumed the single whitespace byte after maxval
    const std::size_t bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(n * bytes);
    if (!is.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(raw.size())))
      throw ValidationError(source + ": truncated PGM raster");
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned v = bytes == 1 ? raw[i] : (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1];
      mask.pixels[i] = v != 0;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      long v;
      if (!(is >> v) || v < 0 || v > maxval)
        throw ValidationError(source + ": bad or missing PGM sample " + std::to_string(i));
      mask.pixels[i] = v != 0;
    }
  }
  return mask;
}

SegMask read_pgm_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ValidationError("cannot open mask file '" + path + "'");
  return read_pgm(in, path);
}

void write_pgm(std::ostream &os, const SegMask &mask) {
  os << "P5\n" << mask.width << ' ' << mask.height << "\n255\n";
  std::vector<char> raw(mask.pixels.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    raw[i] = mask.pixels[i] ? static_cast<char>(255) : 0;
  os.write(raw.data(), static_cast<std::streamsize>(raw.size()));
}

Kernel read_kernel(std::istream &is, const std::string &source) {
  Kernel k;
  if (!(is >> k.rows >> k.cols) || k.rows < 1 || k.cols < 1)
    throw ValidationError(source + ": kernel header must be 'rows cols'");
  k.weights.resize(k.rows * k.cols);
  double total = 0.0;
  for (double &v : k.weights) {
    if (!(is >> v) || !(v >= 0.0) || !std::isfinite(v))
      throw ValidationError(source + ": kernel weights must be finite and non-negative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ValidationError(source + ": kernel weights sum to " + std::to_string(total) +
                          ", expected 1");
  return k;
}

void write_kernel(std::ostream &os, const Kernel &kernel) {
  os << kernel.rows << ' ' << kernel.cols << '\n';
  char buf[40];
  for (std::size_t r = 0; r < kernel.rows; ++r) {
    for (std::size_t c = 0; c < kernel.cols; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", kernel.at(r, c));
      os << (c ? " " : "") << buf;
    }
    os << '\n';
  }
}

MaskStore load_mask_directory(const std::string &dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw ValidationError("mask directory '" + dir + "' does not exist");
  MaskStore store;
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".pgm")
      continue;
    store.emplace(entry.path().stem().string(), read_pgm_file(entry.path().string()));
  }
  return store;
}

} // namespace fdnn
