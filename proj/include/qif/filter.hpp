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

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "qif/interp.hpp"

namespace qif {

enum class FilterKind { lowpass, bandpass, multiband };

/// Window applied to the windowed-sinc prototype. Every variant is forced to
/// exact zeros at both ends (the Hamming pedestal is subtracted).
enum class Window { tukey, hamming, hann, blackman };

const char* to_string(FilterKind k);
const char* to_string(Window w);
FilterKind filter_kind_from_string(const std::string& s);
Window window_from_string(const std::string& s);

struct Center {
  double f0_mhz = 0.0;
  double phase_rad = 0.0;
  double weight = 1.0;
};

struct FilterSpec {
  FilterKind kind = FilterKind::bandpass;
  std::vector<Center> centers;
  double cutoff_mhz = 0.125;
  double duration_us = 4.0;
  int taps = 0;  // 0: derived as duration * sample_rate + 1
  double sample_rate_per_us = 250.0;
  Window window = Window::tukey;
  double tukey_fraction = 0.5;
  double normalize_peak = 0.9;

  /// Tap count after applying the default rule. Throws InvalidInput on any
  /// violated invariant (even taps, cutoff at or above Nyquist, ...).
  int resolved_taps() const;
  void validate() const;

  static FilterSpec from_json(const std::string& text);
  std::string to_json() const;
};

/// Uniformly sampled kernel on [0, t_f] plus its C1 interpolant.
class ImpulseResponse {
 public:
  ImpulseResponse() = default;
  ImpulseResponse(std::vector<double> samples, double sample_rate_per_us, FilterSpec spec = {});

  const std::vector<double>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double sample_rate() const { return fs_; }
  double dt() const { return 1.0 / fs_; }
  double duration() const { return static_cast<double>(samples_.size() - 1) / fs_; }
  double time(std::size_t k) const { return static_cast<double>(k) / fs_; }
  double peak() const;
  bool is_symmetric() const;

  const FilterSpec& spec() const { return spec_; }
  bool overlap_warning() const { return overlap_warning_; }
  void set_overlap_warning(bool w) { overlap_warning_ = w; }
  const MonotoneCubic& interpolant() const { return interp_; }

  void write_csv(const std::string& path) const;
  std::string to_csv() const;

 private:
  std::vector<double> samples_;
  double fs_ = 1.0;
  FilterSpec spec_;
  bool overlap_warning_ = false;
  MonotoneCubic interp_;
};

/// Continuous-time spectrum F(f) = integral h(t) exp(-i 2 pi f (t - origin)) dt,
/// approximated by a Riemann sum over the kernel samples.
struct TransferFunction {
  std::vector<double> frequencies;  // MHz
  std::vector<std::complex<double>> values;
  double time_origin_us = 0.0;

  std::vector<double> magnitude_squared() const;
  std::vector<double> magnitude() const;
};

ImpulseResponse design_lowpass(const FilterSpec& spec);
ImpulseResponse modulate_bandpass(const ImpulseResponse& theta, double f0_mhz, double phase_rad);
ImpulseResponse combine_multiband(const FilterSpec& spec);
ImpulseResponse normalize_kernel(const ImpulseResponse& h, double target_peak = 0.9);

/// Full pipeline for any kind: prototype, modulation, normalization to
/// spec.normalize_peak.
ImpulseResponse design_filter(const FilterSpec& spec);

double evaluate(const ImpulseResponse& h, double t_us);

/// Fourier transform about the kernel midpoint t_f/2, so symmetric real
/// kernels give purely real values.
TransferFunction transfer_function(const ImpulseResponse& h, const std::vector<double>& f_grid);
/// Same, about an explicit time origin.
TransferFunction transfer_function(const ImpulseResponse& h, const std::vector<double>& f_grid,
                                   double time_origin_us);
/// Cosine projection sum h[n] cos(2 pi f (t_n - t_f/2)) / F_s.
std::vector<double> cosine_transform(const ImpulseResponse& h, const std::vector<double>& f_grid);

struct SpectrumDesignOptions {
  double sample_rate_per_us = 250.0;
  double taper_fraction = 0.1;  // Tukey taper forcing the zero endpoints
  double normalize_peak = 0.9;  // <= 0 leaves the kernel unnormalized
};

/// Inverse transform of a one-sided target (f >= 0, uniform grid) assuming a
/// real kernel, then tapered to zero endpoints and optionally normalized.
ImpulseResponse design_from_spectrum(const TransferFunction& target, double duration_us,
                                     const SpectrumDesignOptions& opt = {});

/// Uniform grid lo, lo+step, ..., hi (inclusive, with rounding tolerance).
std::vector<double> linspace_step(double lo, double hi, double step);

}  // namespace qif
