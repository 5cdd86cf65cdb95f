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

#include <memory>
#include <string>
#include <vector>

#include "qif/filter.hpp"
#include "qif/invariant.hpp"

namespace qif {

enum class Waveform { cosine, sine, samples };

const char* to_string(Waveform w);
Waveform waveform_from_string(const std::string& s);

/// Deterministic z-axis probe delta * f_in(t).
struct SignalSpec {
  Waveform waveform = Waveform::cosine;
  double frequency_mhz = 0.0;
  double phase_rad = 0.0;
  double amplitude = 0.0;  // delta, rad/us
  bool symmetric_time = true;  // evaluate at t_sym = t - t_f/2
  double sample_dt = 0.0;
  std::vector<double> samples;
  std::shared_ptr<const MonotoneCubic> sample_interp;

  static SignalSpec cosine(double f_mhz, double delta, double phase = 0.0);
  static SignalSpec sine(double f_mhz, double delta, double phase = 0.0);
  static SignalSpec from_samples(double dt, std::vector<double> values, double delta);

  /// Unit-amplitude waveform f_in(t) for a protocol of length t_f.
  double shape(double t, double t_f) const;
  void validate() const;
};

struct ResponsePrediction {
  double A1 = 0.0;
  double A2 = 0.0;
  double A_tilde = 0.0;
  double sigma_x_shift = 0.0;
  double sigma_y_shift = 0.0;
  double sigma_z_shift = 0.0;
  double magnus_z_abs = 0.0;
  double magnus_gamma = 0.0;
  double magnus_sz = 1.0;        // predicted <sigma_z(t_f)> from the Magnus form
  double second_order_sz = 1.0;  // 1 - (delta^2/2) A^2
};

/// Quadrature refinement: 1 uses the auxiliary grid, r > 1 evaluates the
/// continuous angle profile on r times as many intervals.
struct Quadrature {
  int refine = 1;
};

ResponsePrediction first_order(const AuxiliaryFields& aux, const LRPhase& lr, const SignalSpec& signal,
                               Quadrature q = {});

/// A = int f_in cos(beta) ds and A~ = int f_in sin(beta) ds (amplitude excluded).
struct AmplitudePair {
  double A = 0.0;
  double A_tilde = 0.0;
};
AmplitudePair response_integrals(const AuxiliaryFields& aux, const SignalSpec& signal, Quadrature q = {});

/// Signed shift <sigma_z> - 1 = -(delta^2/2) A^2. Requires alpha == pi.
double second_order_deficit(const AuxiliaryFields& aux, const SignalSpec& signal, Quadrature q = {});

struct ConvolutionResult {
  double value = 0.0;  // delta * (f_in * H)(t_f)
  bool symmetry_warning = false;
};
ConvolutionResult convolution_amplitude(const ImpulseResponse& h, const SignalSpec& signal);

struct PhaseLawResult {
  std::vector<double> phases;
  std::vector<double> values;  // delta^2 A^2(phi)
  double constant = 0.0;       // (delta * 0.5 * int theta)^2
  double max_fit_residual = 0.0;  // max |values - constant sin^2| / constant
  bool slow_carrier_warning = false;
};
/// Phase sweep of a carrier under a fixed envelope against a sine probe at f0.
PhaseLawResult phase_law(const ImpulseResponse& envelope, double f0_mhz, const std::vector<double>& phases,
                         const SignalSpec& signal);

ResponsePrediction magnus_predict(const AuxiliaryFields& aux, const SignalSpec& signal, Quadrature q = {});

}  // namespace qif
