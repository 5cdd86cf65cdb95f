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

#include "qif/dynamics.hpp"
#include "qif/filter.hpp"
#include "qif/util.hpp"

namespace qif {

enum class PulseAxis { x, y };

/// Equally spaced pi pulses, t_k = t_f (2k - 1) / (2n). Width 0 means ideal
/// (instantaneous) pulses.
struct PulseSequence {
  int n_pulses = 0;
  double t_f = 4.0;
  std::vector<double> pulse_times;
  double pulse_width = 0.0;
  double pulse_amplitude = 0.0;  // rad/us including amplitude_scale; 0 for ideal pulses
  double amplitude_scale = 1.0;
  PulseAxis axis = PulseAxis::x;

  /// Rotation angle of each pi pulse (s * pi).
  double pulse_angle() const { return amplitude_scale * kPi; }
  std::string to_json() const;
  static PulseSequence from_json(const std::string& text);
};

PulseSequence build_cpmg(int n, double t_f, double width, double scale, PulseAxis axis = PulseAxis::x);
/// Free evolution between the preparation and readout pulses (no pi pulses).
PulseSequence build_ramsey(double t_f, double width, double scale);

struct TraceOptions {
  /// Adds a pi/2 preparation about +x at t = 0 and a closing pi/2 at t_f,
  /// signed so the ideal sequence returns |0>. Finite-width sequences use
  /// pulses of half the pi-pulse width at the same amplitude.
  bool with_readout = false;
};

/// Pulse part of the Hamiltonian on a uniform dt grid, plus optional signal
/// and noise on z. Ideal pulses become kicks between segments.
HamiltonianTrace sequence_to_trace(const PulseSequence& seq, double dt, const TraceOptions& opt = {},
                                   const SignalSpec* signal = nullptr, const NoiseTrace* noise = nullptr);

/// Full protocol from |0>: preparation, pulses, readout. Returns <sigma_z>.
PropagationResult simulate_cpmg(const PulseSequence& seq, const SignalSpec* signal, const NoiseTrace* noise,
                                const StepConfig& cfg = {});

/// Toggling-frame transform  int y(t) exp(-i 2 pi f (t - t_f/2)) dt  of the
/// ideal sign-switching function.
TransferFunction cpmg_analytic_filter(const PulseSequence& seq, const std::vector<double>& f_grid);

struct CpmgResponse {
  std::vector<double> frequencies;
  std::vector<double> deficit;      // 1 - <sigma_z> under a cosine probe
  std::vector<double> simulated;    // sqrt(2 deficit) / delta
  std::vector<double> analytic;     // |Re of the toggling transform| (cosine-probe response)
  TransferFunction toggling;
};

/// Weak cosine-probe simulation across f_grid plus the analytic cross-check.
CpmgResponse cpmg_filter_response(const PulseSequence& seq, const std::vector<double>& f_grid, double delta = 0.01,
                                  const StepConfig& cfg = {}, int threads = 1);

}  // namespace qif
