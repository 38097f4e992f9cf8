// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "fdnn/io.hpp"

#include "fdnn/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

namespace fdnn {

using nlohmann::json;

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace {

class LineReader {
public:
  LineReader(std::istream &is, std::string source) : is_(is), source_(std::move(source)) {}

  /// Next non-blank line parsed as a JSON object; false at end of stream.
  bool next(json &obj) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") == std::string::npos)
        continue;
      try {
        obj = json::parse(line);
      } catch (const json::parse_error &e) {
        fail("malformed JSON (" + std::string(e.what()) + ")");
      }
      if (!obj.is_object())
        fail("record must be a JSON object");
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string &what) const { throw ParseError(source_, line_no_, what); }

  double real(const json &obj, const char *key) const {
    auto it = obj.find(key);
    if (it == obj.end())
      fail(std::string("missing field '") + key + "'");
    if (!it->is_number())
      fail(std::string("field '") + key + "' must be a number");
    const double v = it->get<double>();
    if (!std::isfinite(v))
      fail(std::string("field '") + key + "' must be finite");
    return v;
  }

  double unit(const json &obj, const char *key) const {
    const double v = real(obj, key);
    if (v < 0.0 || v > 1.0)
      fail(std::string("field '") + key + "' = " + format_real(v) + " outside [0, 1]");
    return v;
  }

  int integer(const json &obj, const char *key, std::optional<int> fallback = std::nullopt) const {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (fallback)
        return *fallback;
      fail(std::string("missing field '") + key + "'");
    }
    if (!it->is_number_integer())
      fail(std::string("field '") + key + "' must be an integer");
    return it->get<int>();
  }

  std::string text(const json &obj, const char *key, bool required = true) const {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required)
        fail(std::string("missing field '") + key + "'");
      return {};
    }
    if (!it->is_string())
      fail(std::string("field '") + key + "' must be a string");
    std::string s = it->get<std::string>();
    if (required && s.empty())
      fail(std::string("field '") + key + "' must not be empty");
    return s;
  }

  bool boolean(const json &obj, const char *key, bool fallback) const {
    auto it = obj.find(key);
    if (it == obj.end())
      return fallback;
    if (!it->is_boolean())
      fail(std::string("field '") + key + "' must be true or false");
    return it->get<bool>();
  }

  std::vector<double> unit_array(const json &obj, const char *key) const {
    auto it = obj.find(key);
    if (it == obj.end())
      fail(std::string("missing field '") + key + "'");
    if (!it->is_array() || it->empty())
      fail(std::string("field '") + key + "' must be a non-empty array");
    std::vector<double> out;
    for (const auto &v : *it) {
      if (!v.is_number())
        fail(std::string("field '") + key + "' must hold numbers");
      const double d = v.get<double>();
      if (!(d >= 0.0 && d <= 1.0))
        fail(std::string("field '") + key + "' value " + format_real(d) + " outside [0, 1]");
      out.push_back(d);
    }
    return out;
  }

  BoundingBox box(const json &obj) const {
    BoundingBox b{real(obj, "x"), real(obj, "y"), real(obj, "w"), real(obj, "h")};
    if (!(b.w > 0.0))
      fail("box width must be positive, got " + format_real(b.w));
    if (!(b.h > 0.0))
      fail("box height must be positive, got " + format_real(b.h));
    return b;
  }

  Detection detection(const json &obj) const {
    Detection d;
    d.image_id = text(obj, "image_id");
    d.id = text(obj, "id");
    d.class_id = integer(obj, "class", 1);
    d.box = box(obj);
    d.score = unit(obj, "score");
    d.source = text(obj, "source", false);
    return d;
  }

  std::size_t line_no() const { return line_no_; }

private:
  std::istream &is_;
  std::string source_;
  std::size_t line_no_ = 0;
};

std::string quoted(const std::string &s) { return json(s).dump(); }

void put_detection_fields(std::ostream &os, const Detection &d) {
  os << "\"image_id\":" << quoted(d.image_id) << ",\"id\":" << quoted(d.id)
     << ",\"class\":" << d.class_id << ",\"x\":" << format_real(d.box.x)
     << ",\"y\":" << format_real(d.box.y) << ",\"w\":" << format_real(d.box.w)
     << ",\"h\":" << format_real(d.box.h)
     << ",\"score\":" << format_real(std::clamp(d.score, 0.0, 1.0));
  if (!d.source.empty())
    os << ",\"source\":" << quoted(d.source);
}

void put_reals(std::ostream &os, std::span<const double> v) {
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i)
    os << (i ? "," : "") << format_real(v[i]);
  os << ']';
}

template <typename T, typename Fn> std::vector<T> read_file(const std::string &path, Fn parse) {
  std::ifstream in(path);
  if (!in)
    throw ValidationError("cannot open '" + path + "'");
  return parse(in, path);
}

} // namespace

std::vector<Detection> parse_detections(std::istream &is, const std::string &source) {
  LineReader reader(is, source);
  std::vector<Detection> out;
  json obj;
  while (reader.next(obj))
    out.push_back(reader.detection(obj));
  return out;
}

std::vector<GroundTruth> parse_ground_truth(std::istream &is, const std::string &source) {
  LineReader reader(is, source);
  std::vector<GroundTruth> out;
  json obj;
  while (reader.next(obj)) {
    GroundTruth g;
    g.image_id = reader.text(obj, "image_id");
    g.box = reader.box(obj);
    g.occlusion = obj.contains("occlusion") ? reader.unit(obj, "occlusion") : 0.0;
    g.truncation = obj.contains("truncation") ? reader.unit(obj, "truncation") : 0.0;
    g.ignore = reader.boolean(obj, "ignore", false);
    g.class_id = reader.integer(obj, "class", 1);
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<ClassifierOpinion> parse_opinions(std::istream &is, const std::string &source) {
  LineReader reader(is, source);
  std::vector<ClassifierOpinion> out;
  std::unordered_set<std::string> seen;
  json obj;
  while (reader.next(obj)) {
    ClassifierOpinion o;
    o.candidate_id = reader.text(obj, "id");
    if (!seen.insert(o.candidate_id).second)
      reader.fail("duplicate opinion for candidate '" + o.candidate_id + "'");
    o.probs = reader.unit_array(obj, "probs");
    if (!out.empty() && o.probs.size() != out.front().probs.size())
      reader.fail("expected " + std::to_string(out.front().probs.size()) +
                  " probabilities, got " + std::to_string(o.probs.size()));
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<LabeledRecord> parse_labeled(std::istream &is, const std::string &source) {
  LineReader reader(is, source);
  std::vector<LabeledRecord> out;
  json obj;
  while (reader.next(obj)) {
    LabeledRecord r;
    r.candidate.detection = reader.detection(obj);
    const auto label = reader.unit_array(obj, "label");
    if (label.size() != 2)
      reader.fail("field 'label' must be [ped, bg]");
    if (std::abs(label[0] + label[1] - 1.0) > 1e-8)
      reader.fail("label components must sum to 1");
    r.candidate.label = {label[0], 1.0 - label[0]};
    if (auto it = obj.find("matched_gt"); it != obj.end() && !it->is_null()) {
      if (!it->is_number_unsigned())
        reader.fail("field 'matched_gt' must be a non-negative integer or null");
      r.candidate.matched_gt = it->get<std::size_t>();
    }
    r.candidate.injected_gt = reader.boolean(obj, "injected", false);
    if (obj.contains("probs"))
      r.probs = reader.unit_array(obj, "probs");
    out.push_back(std::move(r));
  }
  return out;
}

void write_detection(std::ostream &os, const Detection &d) {
  os << '{';
  put_detection_fields(os, d);
  os << "}\n";
}

void write_ground_truth(std::ostream &os, const GroundTruth &g) {
  os << "{\"image_id\":" << quoted(g.image_id) << ",\"x\":" << format_real(g.box.x)
     << ",\"y\":" << format_real(g.box.y) << ",\"w\":" << format_real(g.box.w)
     << ",\"h\":" << format_real(g.box.h) << ",\"occlusion\":" << format_real(g.occlusion)
     << ",\"ignore\":" << (g.ignore ? "true" : "false") << ",\"class\":" << g.class_id;
  if (g.truncation != 0.0)
    os << ",\"truncation\":" << format_real(g.truncation);
  os << "}\n";
}

void write_opinion(std::ostream &os, const ClassifierOpinion &o) {
  os << "{\"id\":" << quoted(o.candidate_id) << ",\"probs\":";
  put_reals(os, o.probs);
  os << "}\n";
}

void write_labeled(std::ostream &os, const LabeledRecord &r) {
  const auto &c = r.candidate;
  os << '{';
  put_detection_fields(os, c.detection);
  os << ",\"label\":[" << format_real(c.label.ped) << ',' << format_real(c.label.bg) << ']';
  os << ",\"matched_gt\":";
  if (c.matched_gt)
    os << *c.matched_gt;
  else
    os << "null";
  os << ",\"injected\":" << (c.injected_gt ? "true" : "false");
  if (r.probs) {
    os << ",\"probs\":";
    put_reals(os, *r.probs);
  }
  os << "}\n";
}

void write_detections(std::ostream &os, std::span<const Detection> dets) {
  for (const auto &d : dets)
    write_detection(os, d);
}

void write_ground_truths(std::ostream &os, std::span<const GroundTruth> gts) {
  for (const auto &g : gts)
    write_ground_truth(os, g);
}

void write_opinions(std::ostream &os, std::span<const ClassifierOpinion> ops) {
  for (const auto &o : ops)
    write_opinion(os, o);
}

std::vector<Detection> read_detections_file(const std::string &path) {
  return read_file<Detection>(path, [](std::istream &is, const std::string &p) {
    return parse_detections(is, p);
  });
}

std::vector<GroundTruth> read_ground_truth_file(const std::string &path) {
  return read_file<GroundTruth>(path, [](std::istream &is, const std::string &p) {
    return parse_ground_truth(is, p);
  });
}

std::vector<ClassifierOpinion> read_opinions_file(const std::string &path) {
  return read_file<ClassifierOpinion>(path, [](std::istream &is, const std::string &p) {
    return parse_opinions(is, p);
  });
}

std::vector<LabeledRecord> read_labeled_file(const std::string &path) {
  return read_file<LabeledRecord>(path, [](std::istream &is, const std::string &p) {
    return parse_labeled(is, p);
  });
}

FusionNetwork read_network_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ValidationError("cannot open '" + path + "'");
  return FusionNetwork::load(in);
}

std::vector<FusionSample> to_fusion_samples(std::span<const LabeledRecord> records) {
  std::vector<FusionSample> out;
  out.reserve(records.size());
  for (const auto &r : records) {
    if (!r.probs)
      throw ValidationError("labeled record '" + r.candidate.detection.id +
                            "' carries no classifier probabilities");
    out.push_back({*r.probs, r.candidate.label, r.candidate.detection.score});
  }
  return out;
}

} // namespace fdnn
