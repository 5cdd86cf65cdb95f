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

#include <cmath>
#include <string>
#include <vector>

#include "qif/qif.h"

namespace {

const char* kSpec = R"({"kind":"bandpass","centers":[{"f0_mhz":1.35}]})";

}  // namespace

TEST(CApi, VersionAndOptions) {
  EXPECT_GT(std::string(qif_version()).size(), 0u);
  qif_options o;
  qif_options_init(&o);
  EXPECT_EQ(o.has_seed, 0);
  EXPECT_EQ(o.format, QIF_FORMAT_CSV);
  qif_options_init(nullptr);
}

TEST(CApi, FilterAndFields) {
  qif_filter* f = nullptr;
  ASSERT_EQ(qif_filter_design(kSpec, &f), QIF_OK);
  ASSERT_EQ(qif_filter_size(f), 1001u);
  EXPECT_DOUBLE_EQ(qif_filter_dt(f), 0.004);
  std::vector<double> h(qif_filter_size(f));
  ASSERT_EQ(qif_filter_samples(f, h.data(), h.size()), QIF_OK);
  EXPECT_NEAR(h.front(), h.back(), 1e-15);
  EXPECT_EQ(qif_filter_samples(f, h.data(), 10), QIF_ERR_INVALID);
  EXPECT_NE(std::string(qif_last_error()).find("too small"), std::string::npos);

  const double freq[3] = {0.3, 1.35, 3.0};
  double mag[3];
  ASSERT_EQ(qif_filter_magnitude(f, freq, mag, 3), QIF_OK);
  EXPECT_GT(mag[1], 50.0 * mag[0]);
  EXPECT_GT(mag[1], 50.0 * mag[2]);

  qif_fields* c = nullptr;
  ASSERT_EQ(qif_fields_from_filter(f, nullptr, &c), QIF_OK);
  ASSERT_EQ(qif_fields_size(c), 1001u);
  std::vector<double> eps(qif_fields_size(c)), del(qif_fields_size(c));
  ASSERT_EQ(qif_fields_epsilon(c, eps.data(), eps.size()), QIF_OK);
  ASSERT_EQ(qif_fields_delta(c, del.data(), del.size()), QIF_OK);
  for (double d : del) EXPECT_EQ(d, 0.0);
  double sz = 0.0;
  ASSERT_EQ(qif_fields_closure(c, 0.001, &sz), QIF_OK);
  EXPECT_NEAR(sz, 1.0, 1e-6);
  EXPECT_EQ(qif_fields_from_filter(f, "fancy", &c), QIF_ERR_INVALID);
  EXPECT_EQ(c, nullptr);
  qif_fields_free(c);
  qif_filter_free(f);
}

TEST(CApi, ErrorCodes) {
  qif_filter* f = nullptr;
  EXPECT_EQ(qif_filter_design("{not json", &f), QIF_ERR_INVALID);
  EXPECT_EQ(f, nullptr);
  EXPECT_GT(std::string(qif_last_error()).size(), 0u);
  EXPECT_EQ(qif_filter_design(nullptr, &f), QIF_ERR_INVALID);
  EXPECT_EQ(qif_filter_design(kSpec, nullptr), QIF_ERR_INVALID);
  EXPECT_EQ(qif_filter_samples(nullptr, nullptr, 0), QIF_ERR_INVALID);
  EXPECT_EQ(qif_filter_size(nullptr), 0u);
  EXPECT_STREQ(qif_buffer_data(nullptr), "");
  qif_filter_free(nullptr);
  qif_buffer_free(nullptr);
  qif_table_free(nullptr);

  qif_buffer* b = nullptr;
  EXPECT_EQ(qif_command_run("design", "{}", nullptr, &b), QIF_ERR_INVALID);
  EXPECT_EQ(qif_command_run("dance", "{}", nullptr, &b), QIF_ERR_INVALID);
  EXPECT_NE(std::string(qif_last_error()).find("dance"), std::string::npos);
  const char* overflow = R"({"filter":{"centers":[{"f0_mhz":1.35}]},"scale":1e308})";
  EXPECT_EQ(qif_command_run("simulate", overflow, nullptr, &b), QIF_ERR_NUMERICAL);
  // The last error is cleared by a successful call.
  ASSERT_EQ(qif_command_run("design", R"({"filter":{"centers":[{"f0_mhz":1.35}]}})", nullptr, &b), QIF_OK);
  EXPECT_STREQ(qif_last_error(), "");
  EXPECT_EQ(std::string(qif_buffer_data(b)).rfind("t_us,h", 0), 0u);
  qif_buffer_free(b);
}

TEST(CApi, SweepRenderAndPlot) {
  const char* cfg = R"({"sweep":{"freq_mhz":[1.0,1.35,1.7]}})";
  qif_options o;
  qif_options_init(&o);
  qif_table* t = nullptr;
  EXPECT_EQ(qif_sweep_run(cfg, "freq_response", &o, &t), QIF_ERR_INVALID);
  EXPECT_NE(std::string(qif_last_error()).find("seed"), std::string::npos);
  o.has_seed = 1;
  o.seed = 4;
  o.threads = 2;
  ASSERT_EQ(qif_sweep_run(cfg, "freq_response", &o, &t), QIF_OK);
  EXPECT_EQ(qif_table_rows(t), 9u);
  qif_buffer* csv = nullptr;
  ASSERT_EQ(qif_table_render(t, QIF_FORMAT_CSV, &csv), QIF_OK);
  qif_table* back = nullptr;
  ASSERT_EQ(qif_table_from_csv(qif_buffer_data(csv), &back), QIF_OK);
  EXPECT_EQ(qif_table_cols(back), qif_table_cols(t));
  qif_buffer* json = nullptr;
  ASSERT_EQ(qif_table_render(t, QIF_FORMAT_JSON, &json), QIF_OK);
  EXPECT_EQ(qif_buffer_data(json)[0], '{');
  qif_buffer* svg = nullptr;
  ASSERT_EQ(qif_table_plot_svg(back, "line", &svg), QIF_OK);
  EXPECT_NE(std::string(qif_buffer_data(svg)).find("<svg"), std::string::npos);
  EXPECT_EQ(qif_table_render(t, static_cast<qif_format>(7), &json), QIF_ERR_INVALID);
  qif_buffer_free(svg);
  qif_buffer_free(json);
  qif_buffer_free(csv);
  qif_table_free(back);
  qif_table_free(t);
}
