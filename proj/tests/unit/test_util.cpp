// Copyright 2026 The QIF Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qif/error.hpp"
#include "qif/interp.hpp"
#include "qif/table.hpp"
#include "qif/util.hpp"

using namespace qif;

TEST(Interp, HitsKnotsExactly) {
  std::vector<double> y = {0.0, 0.3, 0.9, 0.4, -0.2, 0.0};
  MonotoneCubic m(0.0, 0.5, y);
  for (std::size_t k = 0; k < y.size(); ++k) EXPECT_EQ(m(0.5 * k), y[k]);
}

TEST(Interp, ZeroOutsideSupport) {
  MonotoneCubic m(0.0, 0.1, {0.0, 1.0, 0.0});
  EXPECT_EQ(m(-1.0), 0.0);
  EXPECT_EQ(m(0.2001), 0.0);
  EXPECT_EQ(m.derivative(-0.5), 0.0);
}

TEST(Interp, NoOvershootBetweenKnots) {
  // Steep step data: a plain cubic spline rings here.
  std::vector<double> y = {0.0, 0.0, 0.0, 0.9, 0.9, 0.9, 0.0, 0.0};
  MonotoneCubic m(0.0, 1.0, y);
  for (int i = 0; i <= 7000; ++i) {
    const double v = m(i * 1e-3);
    EXPECT_LE(v, 0.9 + 1e-15);
    EXPECT_GE(v, -1e-15);
  }
}

TEST(Interp, DerivativeMatchesFiniteDifference) {
  std::vector<double> y;
  for (int k = 0; k <= 40; ++k) y.push_back(std::sin(0.2 * k));
  MonotoneCubic m(0.0, 0.2, y);
  for (double t = 0.05; t < 7.9; t += 0.37) {
    const double h = 1e-6;
    const double fd = (m(t + h) - m(t - h)) / (2 * h);
    EXPECT_NEAR(m.derivative(t), fd, 1e-6) << "t=" << t;
  }
}

TEST(Interp, ReproducesSmoothFunction) {
  std::vector<double> y;
  for (int k = 0; k <= 400; ++k) y.push_back(std::sin(0.01 * k));
  MonotoneCubic m(0.0, 0.01, y);
  for (double t = 0.003; t < 4.0; t += 0.0137) EXPECT_NEAR(m(t), std::sin(t), 1e-5);
}

TEST(Util, FormatNumberDropsNegativeZero) {
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(0.25), "0.25");
  EXPECT_EQ(format_number(1.0 / 3.0, 6), "0.333333");
}

TEST(Util, Fnv1aKnownValues) {
  // Reference values of the 64-bit FNV-1a function.
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Util, SplitmixKnownValue) {
  // First output of the reference SplitMix64 generator seeded with 0.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Util, ParallelForVisitsEachIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(Util, ParallelForRethrows) {
  EXPECT_THROW(parallel_for(50, 3,
                            [](std::size_t i) {
                              if (i == 17) throw InvalidInput("boom");
                            }),
               InvalidInput);
}

TEST(Table, RejectsRaggedRows) {
  ResultTable t({"a", "b"});
  EXPECT_THROW(t.add_row({1.0}), InvalidInput);
}

TEST(Table, CsvRoundTrip) {
  ResultTable t({"freq_mhz", "protocol", "sz"});
  t.set_meta("seed", "5");
  t.add_row({1.25, std::string("qif"), 0.999});
  t.add_row({1.5, std::string("cpmg-4"), -0.125});
  const std::string csv = t.to_csv();
  const ResultTable back = ResultTable::from_csv(csv);
  EXPECT_EQ(back.to_csv(), csv);
  EXPECT_EQ(back.meta("seed"), "5");
  EXPECT_EQ(back.text(1, 1), "cpmg-4");
  EXPECT_DOUBLE_EQ(back.number(1, 2), -0.125);
}

TEST(Table, MissingColumnNamed) {
  ResultTable t({"a"});
  try {
    t.require_column("deficit");
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("deficit"), std::string::npos);
  }
}
