// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "fdnn/report.hpp"

#include "fdnn/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace fdnn {

void write_ablation_text(std::ostream &os, const AblationTable &table) {
  std::size_t name_w = 7;
  for (const auto &v : table.variants)
    name_w = std::max(name_w, v.size());
  std::vector<std::size_t> col_w;
  for (const auto &s : table.settings)
    col_w.push_back(std::max<std::size_t>(s.size(), 8));

  auto pad = [&](const std::string &s, std::size_t w) {
    os << s << std::string(w > s.size() ? w - s.size() : 0, ' ');
  };
  pad("variant", name_w);
  for (std::size_t j = 0; j < table.settings.size(); ++j) {
    os << "  ";
    pad(table.settings[j], col_w[j]);
  }
  os << '\n';
  char buf[32];
  for (std::size_t i = 0; i < table.variants.size(); ++i) {
    pad(table.variants[i], name_w);
    for (std::size_t j = 0; j < table.settings.size(); ++j) {
      if (std::isnan(table.lamr[i][j]))
        std::snprintf(buf, sizeof buf, "n/a");
      else
        std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * table.lamr[i][j]);
      os << "  ";
      pad(buf, col_w[j]);
    }
    os << '\n';
  }
}

void write_ablation_csv(std::ostream &os, const AblationTable &table) {
  os << "variant,setting,lamr\n";
  for (std::size_t i = 0; i < table.variants.size(); ++i)
    for (std::size_t j = 0; j < table.settings.size(); ++j)
      os << table.variants[i] << ',' << table.settings[j] << ','
         << (std::isnan(table.lamr[i][j]) ? std::string() : format_real(table.lamr[i][j])) << '\n';
}

void write_curve_csv(std::ostream &os, const EvalCurve &curve) {
  os << "threshold,fppi,miss_rate\n";
  for (const auto &p : curve.points)
    os << format_real(p.threshold) << ',' << format_real(p.fppi) << ','
       << format_real(p.miss_rate) << '\n';
}

namespace {

std::string xml_escape(const std::string &s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out.push_back(ch);
    }
  }
  return out;
}

} // namespace

void write_curves_svg(std::ostream &os, std::span<const NamedCurve> curves,
                      const std::string &title) {
  constexpr double width = 640, height = 480;
  constexpr double left = 70, right = 20, top = 40, bottom = 60;
  constexpr double fppi_lo = -3.0, fppi_hi = 1.0; // log10 range
  constexpr double miss_lo = -2.0, miss_hi = 0.0;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double fppi) {
    const double l = std::clamp(std::log10(std::max(fppi, 1e-3)), fppi_lo, fppi_hi);
    return left + (l - fppi_lo) / (fppi_hi - fppi_lo) * pw;
  };
  auto py = [&](double miss) {
    const double l = std::clamp(std::log10(std::max(miss, 1e-2)), miss_lo, miss_hi);
    return top + (miss_hi - l) / (miss_hi - miss_lo) * ph;
  };
  static const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  char buf[128];

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(title)
     << "</text>\n";
  for (int e = -3; e <= 1; ++e) {
    const double x = px(std::pow(10.0, e));
    std::snprintf(buf, sizeof buf, "%.1f", x);
    os << "<line x1=\"" << buf << "\" y1=\"" << top << "\" x2=\"" << buf << "\" y2=\""
       << top + ph << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << buf << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">1e" << e
       << "</text>\n";
  }
  for (double m : {0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.64, 0.8, 1.0}) {
    std::snprintf(buf, sizeof buf, "%.1f", py(m));
    os << "<line x1=\"" << left << "\" y1=\"" << buf << "\" x2=\"" << left + pw << "\" y2=\""
       << buf << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << buf << "\" text-anchor=\"end\">" << m
       << "</text>\n";
  }
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15
     << "\" text-anchor=\"middle\">false positives per image</text>\n";
  os << "<text transform=\"translate(18," << top + ph / 2
     << ") rotate(-90)\" text-anchor=\"middle\">miss rate</text>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto &[name, c] = curves[i];
    const char *color = colors[i % 6];
    // staircase: miss rate holds until the next operating point
    os << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << color << "\" points=\"";
    double prev_y = py(1.0);
    std::snprintf(buf, sizeof buf, "%.1f,%.1f", px(1e-3), prev_y);
    os << buf;
    for (const auto &p : c.points) {
      std::snprintf(buf, sizeof buf, " %.1f,%.1f %.1f,%.1f", px(p.fppi), prev_y, px(p.fppi),
                    py(p.miss_rate));
      os << buf;
      prev_y = py(p.miss_rate);
    }
    std::snprintf(buf, sizeof buf, " %.1f,%.1f", px(1e1), prev_y);
    os << buf << "\"/>\n";
    std::snprintf(buf, sizeof buf, "%.2f%% ", 100.0 * log_average_miss_rate(c));
    const double ly = top + 16 + 16.0 * static_cast<double>(i);
    os << "<line x1=\"" << left + pw - 170 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw - 150
       << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + pw - 145 << "\" y=\"" << ly << "\">" << buf << xml_escape(name) << "</text>\n";
  }
  os << "</svg>\n";
}

} // namespace fdnn
