// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "fdnn/config.hpp"

#include "fdnn/error.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>

namespace fdnn {

namespace pt = boost::property_tree;

IniConfig::IniConfig() : tree_(std::make_unique<pt::ptree>()) {}
IniConfig::~IniConfig() = default;
IniConfig::IniConfig(const IniConfig &o)
    : tree_(std::make_unique<pt::ptree>(*o.tree_)), source_(o.source_), base_dir_(o.base_dir_) {}
IniConfig &IniConfig::operator=(const IniConfig &o) {
  if (this != &o) {
    *tree_ = *o.tree_;
    source_ = o.source_;
    base_dir_ = o.base_dir_;
  }
  return *this;
}

IniConfig IniConfig::parse(std::istream &is, const std::string &source) {
  IniConfig cfg;
  cfg.source_ = source;
  try {
    pt::read_ini(is, *cfg.tree_);
  } catch (const pt::ini_parser_error &e) {
    throw ValidationError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  return cfg;
}

IniConfig IniConfig::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ValidationError("cannot open config '" + path + "'");
  IniConfig cfg = parse(in, path);
  cfg.base_dir_ = std::filesystem::path(path).parent_path().string();
  return cfg;
}

bool IniConfig::has(const std::string &key) const { return raw(key).has_value(); }

std::optional<std::string> IniConfig::raw(const std::string &key) const {
  auto v = tree_->get_optional<std::string>(key);
  if (!v)
    return std::nullopt;
  std::string s = boost::algorithm::trim_copy(*v);
  if (s.empty())
    return std::nullopt;
  return s;
}

std::string IniConfig::text(const std::string &key, const std::string &fallback) const {
  return raw(key).value_or(fallback);
}

namespace {

double to_real(const std::string &s, const std::string &key, const std::string &source) {
  char *end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || !std::isfinite(v))
    throw ValidationError(source + ": '" + key + "' must be a number, got '" + s + "'");
  return v;
}

} // namespace

double IniConfig::real(const std::string &key, double fallback) const {
  auto v = raw(key);
  return v ? to_real(*v, key, source_) : fallback;
}

long IniConfig::integer(const std::string &key, long fallback) const {
  auto v = raw(key);
  if (!v)
    return fallback;
  char *end = nullptr;
  const long n = std::strtol(v->c_str(), &end, 10);
  if (end == v->c_str() || *end != '\0')
    throw ValidationError(source_ + ": '" + key + "' must be an integer, got '" + *v + "'");
  return n;
}

bool IniConfig::flag(const std::string &key, bool fallback) const {
  auto v = raw(key);
  if (!v)
    return fallback;
  const std::string s = boost::algorithm::to_lower_copy(*v);
  if (s == "true" || s == "yes" || s == "on" || s == "1")
    return true;
  if (s == "false" || s == "no" || s == "off" || s == "0")
    return false;
  throw ValidationError(source_ + ": '" + key + "' must be true or false, got '" + *v + "'");
}

std::vector<std::string> IniConfig::list(const std::string &key) const {
  std::vector<std::string> out;
  auto v = raw(key);
  if (!v)
    return out;
  boost::algorithm::split(out, *v, boost::algorithm::is_any_of(","));
  for (auto &s : out)
    boost::algorithm::trim(s);
  std::erase_if(out, [](const std::string &s) { return s.empty(); });
  return out;
}

std::vector<double> IniConfig::reals(const std::string &key,
                                     const std::vector<double> &fallback) const {
  if (!has(key))
    return fallback;
  std::vector<double> out;
  for (const auto &s : list(key))
    out.push_back(to_real(s, key, source_));
  return out;
}

std::string IniConfig::path(const std::string &key) const {
  auto v = raw(key);
  if (!v)
    return {};
  std::filesystem::path p(*v);
  if (p.is_relative() && !base_dir_.empty())
    p = std::filesystem::path(base_dir_) / p;
  return p.lexically_normal().string();
}

AnchorJob anchor_job_from(const IniConfig &ini) {
  AnchorJob job;
  const double iw = ini.real("anchors.image_width", 640.0);
  const double ih = ini.real("anchors.image_height", 480.0);
  const std::string preset = ini.text("anchors.preset", "pedestrian");
  if (preset == "pedestrian") {
    job.config = pedestrian_anchor_preset(iw, ih);
  } else if (preset == "none") {
    job.config.image_width = iw;
    job.config.image_height = ih;
  } else {
    throw ValidationError("unknown anchor preset '" + preset + "'");
  }
  auto &c = job.config;
  c.aspect_ratios = ini.reals("anchors.aspect_ratios", c.aspect_ratios);
  c.relative_heights = ini.reals("anchors.relative_heights", c.relative_heights);
  if (ini.has("anchors.extra_ratio"))
    c.extra_ratio = ini.real("anchors.extra_ratio", 0.0);
  c.extra_heights = ini.reals("anchors.extra_heights", c.extra_heights);
  c.clip = ini.flag("anchors.clip", false);
  c.validate();

  for (const auto &item : ini.list("anchors.layers")) {
    const auto colon = item.find(':');
    const auto x = item.find('x', colon == std::string::npos ? 0 : colon);
    if (colon == std::string::npos || x == std::string::npos)
      throw ValidationError("anchor layer '" + item + "' must look like name:ROWSxCOLS");
    FeatureMapSpec spec;
    spec.name = item.substr(0, colon);
    try {
      spec.rows = std::stoi(item.substr(colon + 1, x - colon - 1));
      spec.cols = std::stoi(item.substr(x + 1));
    } catch (const std::exception &) {
      throw ValidationError("anchor layer '" + item + "' has a bad size");
    }
    job.layers.push_back(spec);
  }
  return job;
}

SynthConfig synth_config_from(const IniConfig &ini) {
  SynthConfig c;
  c.seed = static_cast<std::uint64_t>(ini.integer("synth.seed", static_cast<long>(c.seed)));
  c.num_images = static_cast<int>(ini.integer("synth.num_images", c.num_images));
  c.image_width = static_cast<int>(ini.integer("synth.image_width", c.image_width));
  c.image_height = static_cast<int>(ini.integer("synth.image_height", c.image_height));
  c.gts_min = static_cast<int>(ini.integer("synth.gts_min", c.gts_min));
  c.gts_max = static_cast<int>(ini.integer("synth.gts_max", c.gts_max));
  c.gt_height_min = ini.real("synth.gt_height_min", c.gt_height_min);
  c.gt_height_max = ini.real("synth.gt_height_max", c.gt_height_max);
  c.gt_aspect = ini.real("synth.gt_aspect", c.gt_aspect);
  c.occluded_fraction = ini.real("synth.occluded_fraction", c.occluded_fraction);
  c.cg_recall = ini.real("synth.cg_recall", c.cg_recall);
  c.fp_rate = ini.real("synth.fp_rate", c.fp_rate);
  c.localization_noise = ini.real("synth.localization_noise", c.localization_noise);
  c.cg_true_score_mean = ini.real("synth.cg_true_score_mean", c.cg_true_score_mean);
  c.cg_false_score_mean = ini.real("synth.cg_false_score_mean", c.cg_false_score_mean);
  c.cg_score_spread = ini.real("synth.cg_score_spread", c.cg_score_spread);
  c.classifier_reliabilities =
      ini.reals("synth.classifier_reliabilities", c.classifier_reliabilities);
  c.mask_fidelity = ini.real("synth.mask_fidelity", c.mask_fidelity);
  c.emit_masks = ini.flag("synth.emit_masks", c.emit_masks);
  c.validate();
  return c;
}

} // namespace fdnn
