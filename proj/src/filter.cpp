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

#include "qif/filter.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "qif/error.hpp"
#include "qif/util.hpp"

namespace qif {

using json = nlohmann::json;

const char* to_string(FilterKind k) {
  switch (k) {
    case FilterKind::lowpass: return "lowpass";
    case FilterKind::bandpass: return "bandpass";
    case FilterKind::multiband: return "multiband";
  }
  return "?";
}

const char* to_string(Window w) {
  switch (w) {
    case Window::tukey: return "tukey";
    case Window::hamming: return "hamming";
    case Window::hann: return "hann";
    case Window::blackman: return "blackman";
  }
  return "?";
}

FilterKind filter_kind_from_string(const std::string& s) {
  if (s == "lowpass") return FilterKind::lowpass;
  if (s == "bandpass") return FilterKind::bandpass;
  if (s == "multiband") return FilterKind::multiband;
  throw InvalidInput("filter.kind: unknown value '" + s + "'");
}

Window window_from_string(const std::string& s) {
  if (s == "tukey") return Window::tukey;
  if (s == "hamming") return Window::hamming;
  if (s == "hann") return Window::hann;
  if (s == "blackman") return Window::blackman;
  throw InvalidInput("filter.window: unknown value '" + s + "'");
}

// ---------------------------------------------------------------------------
// FilterSpec

int FilterSpec::resolved_taps() const {
  if (!(sample_rate_per_us > 0.0) || !std::isfinite(sample_rate_per_us))
    throw InvalidInput("filter.sample_rate_per_us must be positive");
  if (!(duration_us > 0.0) || !std::isfinite(duration_us))
    throw InvalidInput("filter.duration_us must be positive");
  if (taps != 0) return taps;
  double n = duration_us * sample_rate_per_us;
  double r = std::round(n);
  if (std::abs(n - r) > 1e-6) throw InvalidInput("filter.duration_us is not a whole number of samples");
  return static_cast<int>(r) + 1;
}

void FilterSpec::validate() const {
  const int n = resolved_taps();
  if (n < 3) throw InvalidInput("filter.taps must be at least 3");
  if (n % 2 == 0) throw InvalidInput("filter.taps must be odd");
  const double step = 1.0 / sample_rate_per_us;
  if (std::abs(duration_us - (n - 1) * step) > step * (1.0 + 1e-9))
    throw InvalidInput("filter.duration_us does not match (taps - 1) / sample_rate_per_us");
  if (!(cutoff_mhz > 0.0)) throw InvalidInput("filter.cutoff_mhz must be positive");
  if (cutoff_mhz >= sample_rate_per_us / 2.0)
    throw InvalidInput("filter.cutoff_mhz must be below the Nyquist frequency");
  if (window == Window::tukey && !(tukey_fraction > 0.0 && tukey_fraction <= 1.0))
    throw InvalidInput("filter.tukey_fraction must lie in (0, 1]");
  if (!(normalize_peak > 0.0 && normalize_peak < 1.0))
    throw InvalidInput("filter.normalize_peak must lie in (0, 1)");
  for (const auto& c : centers) {
    if (!(c.f0_mhz >= 0.0) || !std::isfinite(c.f0_mhz)) throw InvalidInput("filter.centers.f0_mhz must be >= 0");
    if (!std::isfinite(c.phase_rad) || !std::isfinite(c.weight))
      throw InvalidInput("filter.centers entries must be finite");
    if (c.f0_mhz + cutoff_mhz >= sample_rate_per_us / 2.0)
      throw InvalidInput("filter.centers.f0_mhz plus cutoff exceeds the Nyquist frequency");
  }
  switch (kind) {
    case FilterKind::lowpass:
      break;
    case FilterKind::bandpass:
      if (centers.size() != 1) throw InvalidInput("filter.centers: bandpass needs exactly one center");
      break;
    case FilterKind::multiband:
      if (centers.size() < 2) throw InvalidInput("filter.centers: multiband needs at least two centers");
      break;
  }
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(std::string("filter.") + key + ": wrong type");
  }
}

}  // namespace

FilterSpec FilterSpec::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("filter spec is not valid JSON: ") + e.what());
  }
  if (j.contains("filter") && j["filter"].is_object()) j = j["filter"];
  if (!j.is_object()) throw InvalidInput("filter spec must be a JSON object");

  FilterSpec s;
  s.kind = filter_kind_from_string(get_or<std::string>(j, "kind", "bandpass"));
  s.cutoff_mhz = get_or<double>(j, "cutoff_mhz", s.cutoff_mhz);
  s.duration_us = get_or<double>(j, "duration_us", s.duration_us);
  s.taps = get_or<int>(j, "taps", 0);
  s.sample_rate_per_us = get_or<double>(j, "sample_rate_per_us", s.sample_rate_per_us);
  s.window = window_from_string(get_or<std::string>(j, "window", "tukey"));
  s.tukey_fraction = get_or<double>(j, "tukey_fraction", s.tukey_fraction);
  s.normalize_peak = get_or<double>(j, "normalize_peak", s.normalize_peak);
  if (j.contains("centers")) {
    if (!j["centers"].is_array()) throw InvalidInput("filter.centers must be an array");
    for (const auto& c : j["centers"]) {
      if (!c.is_object()) throw InvalidInput("filter.centers entries must be objects");
      Center ctr;
      ctr.f0_mhz = get_or<double>(c, "f0_mhz", 0.0);
      ctr.phase_rad = get_or<double>(c, "phase_rad", 0.0);
      ctr.weight = get_or<double>(c, "weight", 1.0);
      s.centers.push_back(ctr);
    }
  }
  s.validate();
  return s;
}

std::string FilterSpec::to_json() const {
  json j;
  j["kind"] = to_string(kind);
  j["centers"] = json::array();
  for (const auto& c : centers)
    j["centers"].push_back({{"f0_mhz", c.f0_mhz}, {"phase_rad", c.phase_rad}, {"weight", c.weight}});
  j["cutoff_mhz"] = cutoff_mhz;
  j["duration_us"] = duration_us;
  j["taps"] = resolved_taps();
  j["sample_rate_per_us"] = sample_rate_per_us;
  j["window"] = to_string(window);
  if (window == Window::tukey) j["tukey_fraction"] = tukey_fraction;
  j["normalize_peak"] = normalize_peak;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// ImpulseResponse

ImpulseResponse::ImpulseResponse(std::vector<double> samples, double sample_rate_per_us, FilterSpec spec)
    : samples_(std::move(samples)), fs_(sample_rate_per_us), spec_(std::move(spec)) {
  if (samples_.size() < 3) throw InvalidInput("impulse response needs at least 3 samples");
  if (!(fs_ > 0.0)) throw InvalidInput("impulse response sample rate must be positive");
  for (double v : samples_)
    if (!std::isfinite(v)) throw NumericalFailure("impulse response contains non-finite samples");
  interp_ = MonotoneCubic(0.0, 1.0 / fs_, samples_);
}

double ImpulseResponse::peak() const {
  double p = 0.0;
  for (double v : samples_) p = std::max(p, std::abs(v));
  return p;
}

bool ImpulseResponse::is_symmetric() const {
  const std::size_t n = samples_.size();
  for (std::size_t k = 0; k < n / 2; ++k)
    if (samples_[k] != samples_[n - 1 - k]) return false;
  return true;
}

std::string ImpulseResponse::to_csv() const {
  std::string out = "t_us,h\n";
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    out += format_number(time(k));
    out += ',';
    out += format_number(samples_[k], 17);
    out += '\n';
  }
  return out;
}

void ImpulseResponse::write_csv(const std::string& path) const { write_text_file(path, to_csv()); }

// ---------------------------------------------------------------------------
// Transforms

std::vector<double> TransferFunction::magnitude_squared() const {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::norm(values[i]);
  return out;
}

std::vector<double> TransferFunction::magnitude() const {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::abs(values[i]);
  return out;
}

TransferFunction transfer_function(const ImpulseResponse& h, const std::vector<double>& f_grid,
                                   double time_origin_us) {
  TransferFunction tf;
  tf.frequencies = f_grid;
  tf.time_origin_us = time_origin_us;
  tf.values.resize(f_grid.size());
  const auto& s = h.samples();
  const double dt = h.dt();
  for (std::size_t i = 0; i < f_grid.size(); ++i) {
    const double w = kTwoPi * f_grid[i];
    double re = 0.0, im = 0.0;
    for (std::size_t n = 0; n < s.size(); ++n) {
      if (s[n] == 0.0) continue;
      const double arg = w * (h.time(n) - time_origin_us);
      re += s[n] * std::cos(arg);
      im -= s[n] * std::sin(arg);
    }
    tf.values[i] = {re * dt, im * dt};
  }
  return tf;
}

TransferFunction transfer_function(const ImpulseResponse& h, const std::vector<double>& f_grid) {
  return transfer_function(h, f_grid, h.duration() / 2.0);
}

std::vector<double> cosine_transform(const ImpulseResponse& h, const std::vector<double>& f_grid) {
  std::vector<double> out(f_grid.size());
  const auto& s = h.samples();
  const double mid = h.duration() / 2.0;
  for (std::size_t i = 0; i < f_grid.size(); ++i) {
    const double w = kTwoPi * f_grid[i];
    double acc = 0.0;
    for (std::size_t n = 0; n < s.size(); ++n) acc += s[n] * std::cos(w * (h.time(n) - mid));
    out[i] = acc * h.dt();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Design

namespace {

// Window value at sample n of N (n in [0, N-1]).
double window_value(Window w, double tukey_fraction, std::size_t n, std::size_t N) {
  const double x = static_cast<double>(n) / static_cast<double>(N - 1);
  switch (w) {
    case Window::hamming: {
      // Pedestal removed and rescaled so the ends are exactly zero.
      const double v = 0.54 - 0.46 * std::cos(kTwoPi * x);
      return (v - 0.08) / 0.92;
    }
    case Window::hann:
      return 0.5 - 0.5 * std::cos(kTwoPi * x);
    case Window::blackman:
      return 0.42 - 0.5 * std::cos(kTwoPi * x) + 0.08 * std::cos(2.0 * kTwoPi * x);
    case Window::tukey: {
      const double a = tukey_fraction;
      const double edge = std::min(x, 1.0 - x);
      if (edge >= a / 2.0) return 1.0;
      return 0.5 * (1.0 - std::cos(kTwoPi * edge / a));
    }
  }
  return 1.0;
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

// Copies the first half onto the second so samples[k] == samples[N-1-k] bitwise.
void mirror(std::vector<double>& v) {
  const std::size_t n = v.size();
  for (std::size_t k = 0; k < n / 2; ++k) v[n - 1 - k] = v[k];
}

FilterSpec as_lowpass(FilterSpec spec) {
  spec.kind = FilterKind::lowpass;
  spec.centers.clear();
  return spec;
}

}  // namespace

ImpulseResponse design_lowpass(const FilterSpec& spec) {
  if (spec.kind != FilterKind::lowpass) throw InvalidInput("design_lowpass: filter.kind must be lowpass");
  spec.validate();
  const std::size_t N = static_cast<std::size_t>(spec.resolved_taps());
  const double fs = spec.sample_rate_per_us;
  const double mid = static_cast<double>(N - 1) / 2.0;
  const double fc = spec.cutoff_mhz / fs;  // cycles per sample

  std::vector<double> h(N, 0.0);
  double sum = 0.0;
  for (std::size_t n = 0; n <= N / 2; ++n) {
    const double m = static_cast<double>(n) - mid;
    h[n] = 2.0 * fc * sinc(2.0 * fc * m) * window_value(spec.window, spec.tukey_fraction, n, N);
  }
  mirror(h);
  for (double v : h) sum += v;
  if (!(std::abs(sum) > 0.0)) throw NumericalFailure("design_lowpass: prototype has zero DC gain");
  for (double& v : h) v /= sum;
  h.front() = 0.0;
  h.back() = 0.0;
  return ImpulseResponse(std::move(h), fs, spec);
}

ImpulseResponse modulate_bandpass(const ImpulseResponse& theta, double f0_mhz, double phase_rad) {
  if (!(f0_mhz >= 0.0) || !std::isfinite(f0_mhz)) throw InvalidInput("modulate_bandpass: f0 must be >= 0");
  const auto& s = theta.samples();
  const std::size_t N = s.size();
  if (s.front() != 0.0 || s.back() != 0.0) throw InvalidInput("modulate_bandpass: prototype endpoints must be zero");
  const double mid = theta.duration() / 2.0;
  std::vector<double> h(N);
  for (std::size_t n = 0; n < N; ++n)
    h[n] = s[n] * std::cos(kTwoPi * f0_mhz * (theta.time(n) - mid) + phase_rad);
  // cos(2 pi f0 t_sym) is even in t_sym; enforce the exact symmetry the
  // prototype already has when the phase keeps the carrier even.
  const double ph = std::remainder(phase_rad, kPi);
  if (ph == 0.0 && theta.is_symmetric()) mirror(h);
  h.front() = 0.0;
  h.back() = 0.0;
  FilterSpec spec = theta.spec();
  spec.kind = FilterKind::bandpass;
  spec.centers = {Center{f0_mhz, phase_rad, 1.0}};
  return ImpulseResponse(std::move(h), theta.sample_rate(), spec);
}

ImpulseResponse combine_multiband(const FilterSpec& spec) {
  if (spec.kind != FilterKind::multiband && spec.kind != FilterKind::bandpass)
    throw InvalidInput("combine_multiband: filter.kind must be multiband");
  spec.validate();
  const ImpulseResponse theta = design_lowpass(as_lowpass(spec));
  const auto& s = theta.samples();
  const std::size_t N = s.size();
  const double mid = theta.duration() / 2.0;
  const double K = static_cast<double>(spec.centers.size());
  std::vector<double> h(N, 0.0);
  bool even = theta.is_symmetric();
  for (const auto& c : spec.centers) {
    if (std::remainder(c.phase_rad, kPi) != 0.0) even = false;
    for (std::size_t n = 0; n < N; ++n)
      h[n] += c.weight * std::cos(kTwoPi * c.f0_mhz * (theta.time(n) - mid) + c.phase_rad);
  }
  for (std::size_t n = 0; n < N; ++n) h[n] *= s[n] / K;
  if (even) mirror(h);
  h.front() = 0.0;
  h.back() = 0.0;
  ImpulseResponse out(std::move(h), theta.sample_rate(), spec);
  bool overlap = false;
  for (std::size_t i = 0; i < spec.centers.size(); ++i)
    for (std::size_t j = i + 1; j < spec.centers.size(); ++j)
      if (std::abs(spec.centers[i].f0_mhz - spec.centers[j].f0_mhz) < 2.0 * spec.cutoff_mhz) overlap = true;
  out.set_overlap_warning(overlap);
  return out;
}

ImpulseResponse normalize_kernel(const ImpulseResponse& h, double target_peak) {
  if (!(target_peak > 0.0 && target_peak < 1.0))
    throw InvalidInput("normalize_kernel: target peak must lie in (0, 1)");
  const double p = h.peak();
  if (!(p > 0.0)) throw InvalidInput("normalize_kernel: kernel is identically zero");
  std::vector<double> out(h.samples());
  const double scale = target_peak / p;
  for (double& v : out) {
    if (std::abs(v) == p)
      v = std::copysign(target_peak, v);
    else
      v *= scale;
  }
  ImpulseResponse r(std::move(out), h.sample_rate(), h.spec());
  r.set_overlap_warning(h.overlap_warning());
  return r;
}

ImpulseResponse design_filter(const FilterSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case FilterKind::lowpass:
      return normalize_kernel(design_lowpass(spec), spec.normalize_peak);
    case FilterKind::bandpass: {
      const auto& c = spec.centers.front();
      ImpulseResponse bp = modulate_bandpass(design_lowpass(as_lowpass(spec)), c.f0_mhz, c.phase_rad);
      ImpulseResponse withspec(bp.samples(), bp.sample_rate(), spec);
      return normalize_kernel(withspec, spec.normalize_peak);
    }
    case FilterKind::multiband:
      return normalize_kernel(combine_multiband(spec), spec.normalize_peak);
  }
  throw InvalidInput("unknown filter kind");
}

double evaluate(const ImpulseResponse& h, double t_us) {
  if (t_us < 0.0 || t_us > h.duration()) return 0.0;
  return h.interpolant().value(t_us);
}

std::vector<double> linspace_step(double lo, double hi, double step) {
  if (!(step > 0.0)) throw InvalidInput("grid step must be positive");
  if (hi < lo) throw InvalidInput("grid upper bound below lower bound");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + step * static_cast<double>(i);
  return g;
}

ImpulseResponse design_from_spectrum(const TransferFunction& target, double duration_us,
                                     const SpectrumDesignOptions& opt) {
  const auto& f = target.frequencies;
  if (f.size() < 2 || f.size() != target.values.size())
    throw InvalidInput("design_from_spectrum: target needs at least two frequency samples");
  if (!(duration_us > 0.0)) throw InvalidInput("design_from_spectrum: duration must be positive");
  const double fs = opt.sample_rate_per_us;
  const double df = f[1] - f[0];
  if (!(df > 0.0) || f[0] < 0.0) throw InvalidInput("design_from_spectrum: grid must be non-negative and increasing");
  for (std::size_t i = 1; i < f.size(); ++i)
    if (std::abs((f[i] - f[i - 1]) - df) > 1e-9 * std::max(1.0, f.back()))
      throw InvalidInput("design_from_spectrum: frequency grid must be uniform");
  if (df > 1.0 / duration_us * (1.0 + 1e-9))
    throw InvalidInput("design_from_spectrum: frequency step coarser than 1/duration");
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] > fs / 2.0 && std::abs(target.values[i]) > 0.0)
      throw InvalidInput("design_from_spectrum: target has energy above the Nyquist frequency");

  FilterSpec spec;
  spec.kind = FilterKind::lowpass;
  spec.duration_us = duration_us;
  spec.sample_rate_per_us = fs;
  spec.window = Window::tukey;
  spec.tukey_fraction = opt.taper_fraction;
  const std::size_t N = static_cast<std::size_t>(spec.resolved_taps());
  const double origin = target.time_origin_us;

  // h(t) = 2 Re sum_k w_k H(f_k) exp(i 2 pi f_k (t - origin)); the DC bin has half weight.
  std::vector<double> h(N, 0.0);
  for (std::size_t n = 0; n < N; ++n) {
    const double t = static_cast<double>(n) / fs - origin;
    double acc = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      const auto& H = target.values[k];
      if (H == std::complex<double>(0.0, 0.0)) continue;
      const double w = (f[k] == 0.0) ? 0.5 * df : df;
      const double arg = kTwoPi * f[k] * t;
      acc += w * (H.real() * std::cos(arg) - H.imag() * std::sin(arg));
    }
    h[n] = 2.0 * acc * window_value(Window::tukey, opt.taper_fraction, n, N);
  }
  h.front() = 0.0;
  h.back() = 0.0;
  ImpulseResponse out(std::move(h), fs, spec);
  if (opt.normalize_peak > 0.0) return normalize_kernel(out, opt.normalize_peak);
  return out;
}

}  // namespace qif
