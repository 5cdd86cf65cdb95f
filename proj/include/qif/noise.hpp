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

#include <cstdint>
#include <string>
#include <vector>

namespace qif {

enum class NoiseKind { one_over_f, ornstein_uhlenbeck, white };

const char* to_string(NoiseKind k);
NoiseKind noise_kind_from_string(const std::string& s);

struct NoiseModel {
  NoiseKind kind = NoiseKind::one_over_f;
  double rms_amplitude = 0.0;     // rad/us
  double exponent = 1.0;          // alpha in 1/f^alpha
  double f_low = 0.01;            // MHz
  double f_high = 10.0;           // MHz
  double correlation_time = 1.0;  // us, Ornstein-Uhlenbeck only
  std::uint64_t seed = 0;

  void validate() const;
  static NoiseModel from_json(const std::string& text);
  std::string to_json() const;
};

/// Dephasing field samples on a uniform grid; values add to the sigma_z/2
/// coefficient. Sample k covers [k dt, (k+1) dt).
struct NoiseTrace {
  double dt = 0.0;
  std::vector<double> values;
  double duration() const { return dt * static_cast<double>(values.size()); }
  std::string to_csv() const;
};

/// One realization, a pure function of (model, duration, dt, trial).
NoiseTrace synthesize(const NoiseModel& model, double duration_us, double dt_us, std::uint64_t trial);

struct Spectrum {
  std::vector<double> frequencies;  // MHz
  std::vector<double> psd;          // (rad/us)^2 / MHz, one-sided
};

/// Hann-windowed periodogram averaged over traces of equal length and step.
Spectrum psd_estimate(const std::vector<NoiseTrace>& traces);

/// Least-squares slope of log10(psd) vs log10(f) over [f_min, f_max].
double loglog_slope(const Spectrum& s, double f_min, double f_max);

}  // namespace qif
