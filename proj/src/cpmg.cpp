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

#include "qif/cpmg.hpp"

#include <cmath>
#include <json.hpp>

#include "qif/error.hpp"

namespace qif {

namespace {

const char* axis_name(PulseAxis a) { return a == PulseAxis::x ? "x" : "y"; }

void place_pulses(PulseSequence& s) {
  s.pulse_times.clear();
  for (int k = 1; k <= s.n_pulses; ++k)
    s.pulse_times.push_back(s.t_f * (2.0 * k - 1.0) / (2.0 * s.n_pulses));
  s.pulse_amplitude = s.pulse_width > 0.0 ? s.amplitude_scale * kPi / s.pulse_width : 0.0;
}

}  // namespace

PulseSequence build_cpmg(int n, double t_f, double width, double scale, PulseAxis axis) {
  if (n < 1) throw InvalidInput("cpmg.n_pulses must be >= 1");
  if (!(t_f > 0.0)) throw InvalidInput("cpmg.t_f must be positive");
  if (!(width >= 0.0)) throw InvalidInput("cpmg.pulse_width must be >= 0");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidInput("cpmg.amplitude_scale must be positive");
  // Adjacent pulses are t_f/n apart and the outer ones sit t_f/(2n) from the ends.
  if (!(n * width < t_f)) throw InvalidInput("cpmg: pulses overlap (n * width >= t_f)");
  PulseSequence s;
  s.n_pulses = n;
  s.t_f = t_f;
  s.pulse_width = width;
  s.amplitude_scale = scale;
  s.axis = axis;
  place_pulses(s);
  return s;
}

PulseSequence build_ramsey(double t_f, double width, double scale) {
  if (!(t_f > 0.0)) throw InvalidInput("ramsey: t_f must be positive");
  if (!(width >= 0.0) || width >= t_f) throw InvalidInput("ramsey: pulse width must lie in [0, t_f)");
  if (!(scale > 0.0)) throw InvalidInput("ramsey: amplitude scale must be positive");
  PulseSequence s;
  s.n_pulses = 0;
  s.t_f = t_f;
  s.pulse_width = width;
  s.amplitude_scale = scale;
  place_pulses(s);
  return s;
}

std::string PulseSequence::to_json() const {
  nlohmann::json j = {{"n_pulses", n_pulses},       {"t_f", t_f},
                      {"pulse_times", pulse_times}, {"pulse_width", pulse_width},
                      {"pulse_amplitude", pulse_amplitude}, {"amplitude_scale", amplitude_scale},
                      {"axis", axis_name(axis)}};
  return j.dump(2);
}

PulseSequence PulseSequence::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("pulse sequence is not valid JSON: ") + e.what());
  }
  if (j.contains("sequence") && j["sequence"].is_object()) j = j["sequence"];
  try {
    const int n = j.value("n_pulses", 4);
    const double tf = j.value("t_f", 4.0);
    const double w = j.value("pulse_width", 0.0);
    const double s = j.value("amplitude_scale", 1.0);
    const std::string ax = j.value("axis", std::string("x"));
    if (ax != "x" && ax != "y") throw InvalidInput("sequence.axis must be x or y");
    if (n == 0) return build_ramsey(tf, w, s);
    return build_cpmg(n, tf, w, s, ax == "x" ? PulseAxis::x : PulseAxis::y);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("sequence: wrong field type: ") + e.what());
  }
}

HamiltonianTrace sequence_to_trace(const PulseSequence& seq, double dt, const TraceOptions& opt,
                                   const SignalSpec* signal, const NoiseTrace* noise) {
  StepConfig cfg;
  cfg.dt = dt;
  HamiltonianTrace tr = assemble_trace(seq.t_f, cfg, nullptr, signal, noise);
  const std::size_t n = tr.segments();
  const double h = seq.t_f / static_cast<double>(n);
  const double ax = seq.axis == PulseAxis::x ? 1.0 : 0.0;
  const double ay = seq.axis == PulseAxis::y ? 1.0 : 0.0;

  // Closing pulse: -x when the pi pulses leave the prepared state on -y.
  const bool flips = seq.axis == PulseAxis::x && seq.n_pulses % 2 == 1;
  const double close_sign = flips ? 1.0 : -1.0;

  if (seq.pulse_width == 0.0) {
    auto idx = [&](double t) {
      return static_cast<std::size_t>(std::min<long long>(static_cast<long long>(n), std::llround(t / h)));
    };
    if (opt.with_readout) tr.kicks.push_back({0, 1.0, 0.0, 0.0, 0.5 * seq.pulse_angle()});
    for (double t : seq.pulse_times) tr.kicks.push_back({idx(t), ax, ay, 0.0, seq.pulse_angle()});
    if (opt.with_readout) tr.kicks.push_back({n, close_sign, 0.0, 0.0, 0.5 * seq.pulse_angle()});
    return tr;
  }

  // Rectangular pulses; a segment partially covered gets the time-averaged drive.
  auto add_pulse = [&](double a, double b, double vx, double vy) {
    const double A = seq.pulse_amplitude;
    const auto k0 = static_cast<std::size_t>(std::max(0.0, std::floor(a / h)));
    for (std::size_t k = k0; k < n; ++k) {
      const double lo = tr.grid[k], hi = tr.grid[k + 1];
      if (lo >= b) break;
      const double ov = std::min(b, hi) - std::max(a, lo);
      if (ov <= 0.0) continue;
      const double frac = ov / (hi - lo);
      tr.x[k] += A * vx * frac;
      tr.y[k] += A * vy * frac;
    }
  };
  const double w = seq.pulse_width;
  if (opt.with_readout) {
    if (seq.n_pulses > 0 && seq.pulse_times.front() - w / 2.0 < w / 2.0 * (1.0 - 1e-9))
      throw InvalidInput("cpmg: readout pulses would overlap the first/last pi pulse");
    add_pulse(0.0, w / 2.0, 1.0, 0.0);
    add_pulse(seq.t_f - w / 2.0, seq.t_f, close_sign, 0.0);
  }
  for (double t : seq.pulse_times) add_pulse(t - w / 2.0, t + w / 2.0, ax, ay);
  return tr;
}

PropagationResult simulate_cpmg(const PulseSequence& seq, const SignalSpec* signal, const NoiseTrace* noise,
                                const StepConfig& cfg) {
  TraceOptions opt;
  opt.with_readout = true;
  const HamiltonianTrace tr = sequence_to_trace(seq, cfg.dt, opt, signal, noise);
  return propagate(tr, basis0(), cfg, basis0());
}

TransferFunction cpmg_analytic_filter(const PulseSequence& seq, const std::vector<double>& f_grid) {
  std::vector<double> edges{0.0};
  for (double t : seq.pulse_times) edges.push_back(t);
  edges.push_back(seq.t_f);
  const double mid = seq.t_f / 2.0;
  TransferFunction tf;
  tf.frequencies = f_grid;
  tf.time_origin_us = mid;
  tf.values.resize(f_grid.size());
  for (std::size_t i = 0; i < f_grid.size(); ++i) {
    const double w = kTwoPi * f_grid[i];
    std::complex<double> acc(0.0, 0.0);
    double sign = 1.0;
    for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
      const double a = edges[j] - mid, b = edges[j + 1] - mid;
      if (w == 0.0) {
        acc += sign * (b - a);
      } else {
        // int_a^b exp(-i w t) dt = (exp(-i w a) - exp(-i w b)) / (i w)
        const std::complex<double> ea = std::polar(1.0, -w * a), eb = std::polar(1.0, -w * b);
        acc += sign * (ea - eb) / std::complex<double>(0.0, w);
      }
      sign = -sign;
    }
    tf.values[i] = acc;
  }
  return tf;
}

CpmgResponse cpmg_filter_response(const PulseSequence& seq, const std::vector<double>& f_grid, double delta,
                                  const StepConfig& cfg, int threads) {
  if (!(delta > 0.0)) throw InvalidInput("cpmg response probe amplitude must be positive");
  for (std::size_t i = 1; i < f_grid.size(); ++i)
    if (f_grid[i] < f_grid[i - 1]) throw InvalidInput("frequency grid must be sorted");
  CpmgResponse r;
  r.frequencies = f_grid;
  r.deficit.resize(f_grid.size());
  r.simulated.resize(f_grid.size());
  parallel_for(f_grid.size(), threads, [&](std::size_t i) {
    const SignalSpec sig = SignalSpec::cosine(f_grid[i], delta);
    const double sz = simulate_cpmg(seq, &sig, nullptr, cfg).final_expectations.sz;
    r.deficit[i] = 1.0 - sz;
    r.simulated[i] = std::sqrt(2.0 * std::max(0.0, 1.0 - sz)) / delta;
  });
  r.toggling = cpmg_analytic_filter(seq, f_grid);
  r.analytic.resize(f_grid.size());
  for (std::size_t i = 0; i < f_grid.size(); ++i) r.analytic[i] = std::abs(r.toggling.values[i].real());
  return r;
}

}  // namespace qif
