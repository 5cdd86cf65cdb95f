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
#include <optional>
#include <string>
#include <vector>

#include "qif/cpmg.hpp"
#include "qif/dynamics.hpp"
#include "qif/filter.hpp"
#include "qif/invariant.hpp"
#include "qif/noise.hpp"
#include "qif/response.hpp"
#include "qif/table.hpp"

namespace qif {

enum class Experiment {
  freq_response,
  phase_sweep,
  amplitude_sweep,
  filter_center_map,
  cpmg_map,
  amplitude_robustness,
  duration_decay,
  dual_band
};

const char* to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);

/// Affine photon-count model. A measurement of <sigma_z> = s gives
/// S(s) = dark + (bright - dark)(1 + s)/2; the two reference preparations read
/// S(s) and S(-s), and the contrast is their difference over their average.
struct ReadoutModel {
  bool enabled = false;
  double bright = 1.0;
  double dark = 0.0;
  void validate() const;
  /// Equals sz when disabled.
  double contrast(double sz) const;
};

struct DecayOptions {
  bool f0_proportional = true;      // f0 scales as t_ref / t_f; false keeps f0 fixed
  bool fractional_bandwidth = true;  // cutoff scales with f0; false keeps it absolute
};

struct SweepConfig {
  Experiment experiment = Experiment::freq_response;
  std::uint64_t seed = 0;
  FilterSpec filter;
  AuxMode mode = AuxMode::exact_arcsin;
  Waveform probe = Waveform::cosine;
  double amplitude = 0.05;          // delta, rad/us
  double probe_phase = 0.0;
  std::optional<double> probe_frequency;  // defaults to the first filter center

  std::vector<double> freq_mhz, phase_rad, amplitudes, center_mhz, scales, duration_us;
  std::vector<int> n_pulses;
  std::vector<std::string> protocols;

  std::optional<NoiseModel> noise;
  std::size_t trials = 1;
  StepConfig step;
  int quadrature_refine = 4;

  double pulse_width = 0.0;  // us; 0 = ideal pulses
  PulseAxis axis = PulseAxis::x;
  ReadoutModel readout;
  DecayOptions decay;

  std::string canonical_json;  // normalized input, hashed into the metadata

  /// Parses a sweep document. The experiment may be given in the document or
  /// by `experiment_override`; a seed is mandatory from one of the two sources.
  static SweepConfig from_json(const std::string& text, std::optional<std::uint64_t> seed_override = {},
                               std::optional<std::string> experiment_override = {});
  std::string config_hash() const;
  bool noisy() const { return noise && noise->rms_amplitude != 0.0; }
};

/// Long-format table: axis columns, protocol, source, sz, sz_stderr, deficit,
/// contrast. Sources are "simulation", "prediction" (response theory) and
/// "magnus" where applicable.
ResultTable run_sweep(const SweepConfig& cfg, int threads = 1);

struct DecayFit {
  double T = 0.0;  // 1/e time, us
  double p = 1.0;  // stretch exponent
  double rss = 0.0;
};

/// Least-squares fit of sz = exp(-(t/T)^p) by nested grid refinement over
/// (log T, p), p in [0.5, 4].
DecayFit fit_stretched_exponential(const std::vector<double>& t, const std::vector<double>& sz);

/// Parses "qif", "free" or "cpmg-<n>"; returns the pulse count (0 for free,
/// -1 for qif).
int parse_protocol(const std::string& name);

/// Default bandpass used by every experiment that does not supply a filter:
/// 1.35 MHz center, 0.125 MHz cutoff, 4 us.
FilterSpec default_filter();

}  // namespace qif
