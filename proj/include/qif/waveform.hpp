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

#include <string>
#include <vector>

#include "qif/invariant.hpp"

namespace qif {

struct WaveformOptions {
  int dt_ns = 4;              // one of 4, 8, 16, 32
  std::size_t max_samples = 65536;
};

struct AwgWaveform {
  int dt_ns = 4;
  int requested_dt_ns = 4;
  std::vector<double> samples;  // epsilon(t) in rad/us at segment midpoints
  bool decimated() const { return dt_ns != requested_dt_ns; }
  /// Header lines followed by one "%.9g" value per line.
  std::string to_text() const;
};

/// Sample count for a protocol of t_f microseconds at dt_ns nanoseconds.
std::size_t waveform_sample_count(double t_f_us, int dt_ns);

/// Resamples epsilon onto the output grid, coarsening 4 -> 16 -> 32 ns when
/// the sample limit is exceeded.
AwgWaveform export_waveform(const ControlFields& fields, const WaveformOptions& opt = {});

}  // namespace qif
