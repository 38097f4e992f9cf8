// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#include "fdnn/report.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace fdnn;

namespace {

AblationTable table() {
  AblationTable t;
  t.variants = {"CG", "CG+fusion"};
  t.settings = {"Reasonable", "Far"};
  t.lamr = {{0.5, NAN}, {0.1234, NAN}};
  return t;
}

} // namespace

TEST(Report, TextTable) {
  std::ostringstream os;
  write_ablation_text(os, table());
  const std::string s = os.str();
  EXPECT_NE(s.find("50.00%"), std::string::npos);
  EXPECT_NE(s.find("12.34%"), std::string::npos);
  EXPECT_NE(s.find("n/a"), std::string::npos);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
}

TEST(Report, Csv) {
  std::ostringstream os;
  write_ablation_csv(os, table());
  EXPECT_EQ(os.str(), "variant,setting,lamr\nCG,Reasonable,0.5\nCG,Far,\n"
                      "CG+fusion,Reasonable,0.1234\nCG+fusion,Far,\n");
}

TEST(Report, CurveCsvAndSvg) {
  EvalCurve c;
  c.num_images = 2;
  c.evaluated_gts = 4;
  c.points = {{0.0, 0.75, 0.9}, {0.5, 0.25, 0.4}};
  std::ostringstream csv;
  write_curve_csv(csv, c);
  EXPECT_EQ(csv.str(), "threshold,fppi,miss_rate\n0.9,0,0.75\n0.4,0.5,0.25\n");

  std::ostringstream svg;
  const std::vector<NamedCurve> curves{{"CG", c}};
  write_curves_svg(svg, curves, "Reasonable");
  const std::string s = svg.str();
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
  EXPECT_NE(s.find("CG"), std::string::npos);
  EXPECT_NE(s.find("Reasonable"), std::string::npos);
}
