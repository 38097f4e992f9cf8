// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#pragma once

#include "fdnn/anchors.hpp"
#include "fdnn/synth.hpp"

#include <boost/property_tree/ptree_fwd.hpp>

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fdnn {

/// Sectioned key=value file ("[section]" headers, ';' or '#' comments).
/// Keys are addressed as "section.key". Type errors raise ValidationError
/// naming the key.
class IniConfig {
public:
  IniConfig();
  ~IniConfig();
  IniConfig(const IniConfig &);
  IniConfig &operator=(const IniConfig &);

  static IniConfig load(const std::string &path);
  static IniConfig parse(std::istream &is, const std::string &source = "<config>");

  /// Directory of the loaded file; relative paths are resolved against it.
  const std::string &base_dir() const { return base_dir_; }

  bool has(const std::string &key) const;
  std::optional<std::string> raw(const std::string &key) const;

  std::string text(const std::string &key, const std::string &fallback) const;
  double real(const std::string &key, double fallback) const;
  long integer(const std::string &key, long fallback) const;
  bool flag(const std::string &key, bool fallback) const;
  /// Comma-separated list.
  std::vector<std::string> list(const std::string &key) const;
  std::vector<double> reals(const std::string &key, const std::vector<double> &fallback) const;
  /// Path value resolved against base_dir(); empty when absent.
  std::string path(const std::string &key) const;

private:
  std::unique_ptr<boost::property_tree::ptree> tree_;
  std::string source_;
  std::string base_dir_;
};

struct AnchorJob {
  std::vector<FeatureMapSpec> layers;
  AnchorConfig config;
};

/// [anchors] preset = pedestrian|none, aspect_ratios, relative_heights,
/// extra_ratio, extra_heights, image_width, image_height, clip, and
/// layers = name:ROWSxCOLS, ...
AnchorJob anchor_job_from(const IniConfig &ini);

/// [synth] section; every SynthConfig field by name.
SynthConfig synth_config_from(const IniConfig &ini);

} // namespace fdnn
