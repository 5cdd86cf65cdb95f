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

#include "qif/waveform.hpp"

#include <cmath>

#include "qif/error.hpp"
#include "qif/util.hpp"

namespace qif {

std::size_t waveform_sample_count(double t_f_us, int dt_ns) {
  if (!(t_f_us > 0.0) || dt_ns <= 0) throw InvalidInput("waveform: duration and dt must be positive");
  return static_cast<std::size_t>(std::llround(t_f_us * 1000.0 / dt_ns));
}

std::string AwgWaveform::to_text() const {
  std::string out = "# qif-waveform v1\n";
  out += "# dt_ns=" + std::to_string(dt_ns) + "\n";
  out += "# n_samples=" + std::to_string(samples.size()) + "\n";
  out += "# units=rad_per_us\n";
  if (decimated()) out += "# decimated_from_dt_ns=" + std::to_string(requested_dt_ns) + "\n";
  for (double v : samples) {
    out += format_number(v, 9);
    out += '\n';
  }
  return out;
}

AwgWaveform export_waveform(const ControlFields& fields, const WaveformOptions& opt) {
  if (opt.dt_ns != 4 && opt.dt_ns != 8 && opt.dt_ns != 16 && opt.dt_ns != 32)
    throw InvalidInput("waveform.dt_ns must be one of 4, 8, 16, 32");
  if (opt.max_samples == 0) throw InvalidInput("waveform.max_samples must be positive");
  const double tf = fields.duration();
  AwgWaveform w;
  w.requested_dt_ns = opt.dt_ns;
  int dt = opt.dt_ns;
  std::size_t n = waveform_sample_count(tf, dt);
  for (int coarser : {16, 32}) {
    if (n <= opt.max_samples) break;
    if (coarser <= dt) continue;
    dt = coarser;
    n = waveform_sample_count(tf, dt);
  }
  if (n > opt.max_samples)
    throw InvalidInput("waveform exceeds max_samples even at 32 ns (" + std::to_string(n) + " samples)");
  w.dt_ns = dt;
  w.samples.resize(n);
  const double step = tf / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    double eps, del;
    fields.at(step * (static_cast<double>(k) + 0.5), eps, del);
    w.samples[k] = eps;
  }
  return w;
}

}  // namespace qif
