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

#pragma once

// JSON helpers shared by the sweep and single-run command parsers.

#include <json.hpp>
#include <string>
#include <vector>

#include "qif/dynamics.hpp"
#include "qif/error.hpp"
#include "qif/filter.hpp"

namespace qif {

using nlohmann::json;

/// Axis given as an array or {start, stop, step|count}.
inline std::vector<double> parse_axis(const json& j, const std::string& field) {
  std::vector<double> v;
  try {
    if (j.is_array()) {
      for (const auto& x : j) v.push_back(x.get<double>());
    } else if (j.is_object()) {
      const double a = j.at("start").get<double>();
      const double b = j.at("stop").get<double>();
      if (j.contains("step")) {
        v = linspace_step(a, b, j["step"].get<double>());
      } else if (j.contains("count")) {
        const int n = j["count"].get<int>();
        if (n < 1) throw InvalidInput(field + ".count must be >= 1");
        if (b < a) throw InvalidInput(field + ".stop is below start");
        for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
      } else {
        throw InvalidInput(field + " needs either step or count");
      }
    } else {
      throw InvalidInput(field + " must be an array or {start, stop, step|count}");
    }
  } catch (const json::exception&) {
    throw InvalidInput(field + ": wrong type or missing start/stop");
  } catch (const InvalidInput& e) {
    const std::string msg = e.what();
    if (msg.rfind(field, 0) == 0) throw;
    throw InvalidInput(field + ": " + msg);
  }
  if (v.empty()) throw InvalidInput(field + " must not be empty");
  for (double x : v)
    if (!std::isfinite(x)) throw InvalidInput(field + " entries must be finite");
  return v;
}

/// {dt_us, sampling}. Range checks are left to the caller.
inline StepConfig parse_step(const json& s) {
  if (!s.is_object()) throw InvalidInput("step must be an object");
  StepConfig c;
  try {
    c.dt = s.value("dt_us", c.dt);
    if (s.contains("sampling")) {
      const std::string m = s["sampling"].get<std::string>();
      if (m == "midpoint")
        c.sampling = Sampling::midpoint;
      else if (m == "left")
        c.sampling = Sampling::left;
      else
        throw InvalidInput("step.sampling must be midpoint or left");
    }
    c.trajectory_store = s.value("store_trajectory", false);
  } catch (const json::exception&) {
    throw InvalidInput("step: wrong field type");
  }
  if (!(c.dt > 0.0) || c.dt > 0.1) throw InvalidInput("step.dt_us must lie in (0, 0.1]");
  return c;
}

inline json parse_json_object(const std::string& text, const char* what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string(what) + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw InvalidInput(std::string(what) + " must be a JSON object");
  return j;
}

}  // namespace qif
