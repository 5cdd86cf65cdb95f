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

#include "qif/response.hpp"

#include <cmath>

#include "qif/error.hpp"
#include "qif/util.hpp"

namespace qif {

const char* to_string(Waveform w) {
  switch (w) {
    case Waveform::cosine: return "cosine";
    case Waveform::sine: return "sine";
    case Waveform::samples: return "samples";
  }
  return "?";
}

Waveform waveform_from_string(const std::string& s) {
  if (s == "cosine" || s == "cos") return Waveform::cosine;
  if (s == "sine" || s == "sin") return Waveform::sine;
  if (s == "samples") return Waveform::samples;
  throw InvalidInput("signal.waveform: unknown value '" + s + "'");
}

SignalSpec SignalSpec::cosine(double f_mhz, double delta, double phase) {
  SignalSpec s;
  s.waveform = Waveform::cosine;
  s.frequency_mhz = f_mhz;
  s.amplitude = delta;
  s.phase_rad = phase;
  return s;
}

SignalSpec SignalSpec::sine(double f_mhz, double delta, double phase) {
  SignalSpec s = cosine(f_mhz, delta, phase);
  s.waveform = Waveform::sine;
  return s;
}

SignalSpec SignalSpec::from_samples(double dt, std::vector<double> values, double delta) {
  SignalSpec s;
  s.waveform = Waveform::samples;
  s.amplitude = delta;
  s.sample_dt = dt;
  s.samples = std::move(values);
  s.validate();
  s.sample_interp = std::make_shared<const MonotoneCubic>(0.0, dt, s.samples);
  return s;
}

void SignalSpec::validate() const {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw InvalidInput("signal.amplitude must be >= 0");
  if (!std::isfinite(frequency_mhz) || frequency_mhz < 0.0) throw InvalidInput("signal.frequency_mhz must be >= 0");
  if (!std::isfinite(phase_rad)) throw InvalidInput("signal.phase_rad must be finite");
  if (waveform == Waveform::samples) {
    if (samples.size() < 2 || !(sample_dt > 0.0)) throw InvalidInput("signal.samples needs >= 2 values and dt > 0");
    for (double v : samples)
      if (!std::isfinite(v)) throw InvalidInput("signal.samples must be finite");
  }
}

double SignalSpec::shape(double t, double t_f) const {
  switch (waveform) {
    case Waveform::cosine:
    case Waveform::sine: {
      const double tt = symmetric_time ? t - t_f / 2.0 : t;
      const double arg = kTwoPi * frequency_mhz * tt + phase_rad;
      return waveform == Waveform::cosine ? std::cos(arg) : std::sin(arg);
    }
    case Waveform::samples:
      if (!sample_interp) throw InvalidInput("sampled signal was not built with SignalSpec::from_samples");
      return sample_interp->value(t);
  }
  return 0.0;
}

namespace {

// Composite trapezoid of g(t, angles) over [0, t_f].
template <class G>
double integrate(const AuxiliaryFields& aux, Quadrature q, G g) {
  const std::size_t n = aux.size();
  if (n < 2) throw InvalidInput("quadrature needs at least two grid points");
  if (q.refine < 1) throw InvalidInput("quadrature refinement must be >= 1");
  double acc = 0.0;
  if (q.refine == 1) {
    for (std::size_t k = 0; k < n; ++k) {
      AngleSample a{aux.alpha[k], aux.beta[k], aux.alpha_dot[k], aux.beta_dot[k]};
      const double w = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
      acc += w * g(aux.time(k), a);
    }
    return acc * aux.dt;
  }
  const std::size_t m = (n - 1) * static_cast<std::size_t>(q.refine) + 1;
  const double h = aux.duration() / static_cast<double>(m - 1);
  for (std::size_t k = 0; k < m; ++k) {
    const double t = h * static_cast<double>(k);
    const double w = (k == 0 || k + 1 == m) ? 0.5 : 1.0;
    acc += w * g(t, aux.at(t));
  }
  return acc * h;
}

double sin_alpha(double a) { return a == kPi ? 0.0 : std::sin(a); }

void require_alpha_pi(const AuxiliaryFields& aux, const char* who) {
  if (!aux.alpha_pi) throw InvalidInput(std::string(who) + ": requires the alpha = pi regime");
}

}  // namespace

ResponsePrediction first_order(const AuxiliaryFields& aux, const LRPhase& lr, const SignalSpec& signal,
                               Quadrature q) {
  signal.validate();
  if (lr.phi_plus.size() != aux.size()) throw InvalidInput("first_order: phase and auxiliary grids differ");
  const double tf = aux.duration();
  const double delta = signal.amplitude;
  ResponsePrediction p;
  if (!aux.alpha_pi) {
    p.A1 = integrate(aux, q, [&](double t, const AngleSample& a) {
      return signal.shape(t, tf) * sin_alpha(a.alpha) * std::cos(a.beta);
    });
  }
  const auto dphi = lr.delta_phi();
  const double d0 = dphi.front();
  const double dfin = dphi.back() - d0;
  // sigma_x shift on the auxiliary grid, where the phase is tabulated.
  double sx = 0.0;
  const std::size_t n = aux.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double s = sin_alpha(aux.alpha[k]) * std::cos(aux.beta[k]);
    const double w = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
    sx += w * signal.shape(aux.time(k), tf) * std::sqrt(std::max(0.0, 1.0 - s * s)) * std::sin(dphi[k] - d0);
  }
  p.sigma_x_shift = -delta * sx * aux.dt;
  p.sigma_y_shift = delta * p.A1 * std::cos(dfin);
  p.sigma_z_shift = delta * p.A1 * std::sin(dfin);
  if (p.A1 == 0.0) p.sigma_y_shift = p.sigma_z_shift = 0.0;
  return p;
}

AmplitudePair response_integrals(const AuxiliaryFields& aux, const SignalSpec& signal, Quadrature q) {
  signal.validate();
  const double tf = aux.duration();
  AmplitudePair r;
  r.A = integrate(aux, q, [&](double t, const AngleSample& a) { return signal.shape(t, tf) * std::cos(a.beta); });
  r.A_tilde =
      integrate(aux, q, [&](double t, const AngleSample& a) { return signal.shape(t, tf) * std::sin(a.beta); });
  return r;
}

double second_order_deficit(const AuxiliaryFields& aux, const SignalSpec& signal, Quadrature q) {
  require_alpha_pi(aux, "second_order_deficit");
  signal.validate();
  if (signal.amplitude == 0.0) return 0.0;
  const double tf = aux.duration();
  const double A =
      integrate(aux, q, [&](double t, const AngleSample& a) { return signal.shape(t, tf) * std::cos(a.beta); });
  return -0.5 * signal.amplitude * signal.amplitude * A * A;
}

ConvolutionResult convolution_amplitude(const ImpulseResponse& h, const SignalSpec& signal) {
  signal.validate();
  const auto& s = h.samples();
  const std::size_t n = s.size();
  const double tf = h.duration();
  ConvolutionResult r;
  r.symmetry_warning = !h.is_symmetric();
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    // (f * H)(t_f) = int f(s) H(t_f - s) ds; asymmetric kernels use H(s) directly.
    const double hv = r.symmetry_warning ? s[k] : s[n - 1 - k];
    const double w = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
    acc += w * signal.shape(h.time(k), tf) * hv;
  }
  r.value = signal.amplitude * acc * h.dt();
  return r;
}

PhaseLawResult phase_law(const ImpulseResponse& envelope, double f0_mhz, const std::vector<double>& phases,
                         const SignalSpec& signal) {
  signal.validate();
  if (signal.waveform != Waveform::sine) throw InvalidInput("phase_law: the probe must be a sine");
  if (phases.empty()) throw InvalidInput("phase_law: empty phase grid");
  const auto& th = envelope.samples();
  const std::size_t n = th.size();
  const double tf = envelope.duration();
  const double dt = envelope.dt();
  PhaseLawResult r;
  r.phases = phases;
  r.slow_carrier_warning = f0_mhz * tf < 2.0;
  double theta_int = 0.0;
  for (std::size_t k = 0; k < n; ++k) theta_int += ((k == 0 || k + 1 == n) ? 0.5 : 1.0) * th[k];
  theta_int *= dt;
  const double delta = signal.amplitude;
  r.constant = std::pow(0.5 * theta_int * delta, 2);
  for (double phi : phases) {
    double A = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = envelope.time(k);
      const double kernel = th[k] * std::cos(kTwoPi * f0_mhz * (t - tf / 2.0) + phi);
      A += ((k == 0 || k + 1 == n) ? 0.5 : 1.0) * signal.shape(t, tf) * kernel;
    }
    A *= dt;
    r.values.push_back(delta * delta * A * A);
  }
  if (r.constant > 0.0) {
    for (std::size_t i = 0; i < phases.size(); ++i) {
      const double model = r.constant * std::pow(std::sin(phases[i]), 2);
      r.max_fit_residual = std::max(r.max_fit_residual, std::abs(r.values[i] - model) / r.constant);
    }
  }
  return r;
}

ResponsePrediction magnus_predict(const AuxiliaryFields& aux, const SignalSpec& signal, Quadrature q) {
  require_alpha_pi(aux, "magnus_predict");
  const AmplitudePair ap = response_integrals(aux, signal, q);
  const double delta = signal.amplitude;
  ResponsePrediction p;
  p.A2 = ap.A;
  p.A_tilde = ap.A_tilde;
  p.magnus_z_abs = 0.5 * delta * std::hypot(ap.A, ap.A_tilde);
  // Two-argument arctangent: gamma = pi/2 when A~ = 0 and A > 0; 0 when both vanish.
  p.magnus_gamma = (ap.A == 0.0 && ap.A_tilde == 0.0) ? 0.0 : std::atan2(ap.A, ap.A_tilde);
  const double s = std::sin(p.magnus_z_abs);
  p.magnus_sz = 1.0 - (1.0 - std::cos(2.0 * p.magnus_gamma)) * s * s;
  p.second_order_sz = 1.0 - 0.5 * delta * delta * ap.A * ap.A;
  return p;
}

}  // namespace qif
