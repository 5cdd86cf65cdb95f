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
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "qif/cpmg.hpp"
#include "qif/dynamics.hpp"
#include "qif/error.hpp"
#include "qif/filter.hpp"
#include "qif/invariant.hpp"
#include "qif/response.hpp"

using namespace qif;

namespace {

NoiseTrace static_offset(double b, double tf, double dt) {
  NoiseTrace n;
  n.dt = dt;
  n.values.assign(static_cast<std::size_t>(std::llround(tf / dt)), b);
  return n;
}

// Toggling function y(t) integrated against cos(2 pi f (t - t_f/2)) by a
// fine midpoint sum, independent of the closed-form segment integrals.
double toggling_cosine(const PulseSequence& s, double f) {
  const int m = 200000;
  const double h = s.t_f / m;
  double acc = 0.0;
  for (int k = 0; k < m; ++k) {
    const double t = (k + 0.5) * h;
    int flips = 0;
    for (double p : s.pulse_times) flips += t > p;
    acc += (flips % 2 ? -1.0 : 1.0) * std::cos(kTwoPi * f * (t - s.t_f / 2.0));
  }
  return acc * h;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

TEST(BuildCpmg, PulseTimes) {
  const PulseSequence s = build_cpmg(4, 4.0, 0.0, 1.0);
  ASSERT_EQ(s.pulse_times.size(), 4u);
  const double expect[4] = {0.5, 1.5, 2.5, 3.5};
  for (int k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(s.pulse_times[k], expect[k]);
  EXPECT_EQ(s.pulse_width, 0.0);
  const PulseSequence hahn = build_cpmg(1, 4.0, 0.0, 1.0);
  ASSERT_EQ(hahn.pulse_times.size(), 1u);
  EXPECT_DOUBLE_EQ(hahn.pulse_times[0], 2.0);
  EXPECT_DOUBLE_EQ(build_cpmg(32, 4.0, 0.02, 0.8).pulse_angle(), 0.8 * kPi);
}

TEST(BuildCpmg, Errors) {
  EXPECT_THROW(build_cpmg(0, 4.0, 0.0, 1.0), InvalidInput);
  EXPECT_THROW(build_cpmg(8, 4.0, 0.5, 1.0), InvalidInput);
  EXPECT_THROW(build_cpmg(4, -1.0, 0.0, 1.0), InvalidInput);
  EXPECT_THROW(build_cpmg(4, 4.0, 0.0, 0.0), InvalidInput);
  for (int n : {1, 7, 64}) {
    const PulseSequence s = build_cpmg(n, 4.0, 0.01, 1.0);
    for (std::size_t k = 0; k < s.pulse_times.size(); ++k) {
      EXPECT_GT(s.pulse_times[k] - s.pulse_width / 2, 0.0);
      EXPECT_LT(s.pulse_times[k] + s.pulse_width / 2, s.t_f);
      if (k > 0) {
        EXPECT_GT(s.pulse_times[k] - s.pulse_times[k - 1], s.pulse_width);
      }
    }
  }
}

TEST(BuildCpmg, JsonRoundTrip) {
  const PulseSequence s = build_cpmg(8, 4.0, 0.02, 0.9, PulseAxis::y);
  const PulseSequence b = PulseSequence::from_json(s.to_json());
  EXPECT_EQ(b.to_json(), s.to_json());
  EXPECT_THROW(PulseSequence::from_json("{\"axis\": \"z\"}"), InvalidInput);
}

TEST(Echo, HahnEchoKeepsPlusX) {
  const PulseSequence s = build_cpmg(1, 4.0, 0.0, 1.0);
  const HamiltonianTrace plain = sequence_to_trace(s, 1e-3);
  EXPECT_NEAR(fidelity(plus_x(), propagate(plain, plus_x()).final_state), 1.0, 1e-12);
  // Static detuning is refocused by the echo.
  const NoiseTrace b = static_offset(0.7, 4.0, 1e-3);
  const HamiltonianTrace det = sequence_to_trace(s, 1e-3, {}, nullptr, &b);
  EXPECT_NEAR(fidelity(plus_x(), propagate(det, plus_x()).final_state), 1.0, 1e-12);
  // Without the pi pulse the same detuning dephases.
  const HamiltonianTrace idle = sequence_to_trace(build_ramsey(4.0, 0.0, 1.0), 1e-3, {}, nullptr, &b);
  EXPECT_LT(fidelity(plus_x(), propagate(idle, plus_x()).final_state), 0.9);
}

TEST(Echo, StaticOffsetFullyRefocused) {
  for (int n : {1, 2, 8}) {
    for (PulseAxis ax : {PulseAxis::x, PulseAxis::y}) {
      const NoiseTrace b = static_offset(0.9, 4.0, 1e-3);
      const PulseSequence s = build_cpmg(n, 4.0, 0.0, 1.0, ax);
      EXPECT_NEAR(simulate_cpmg(s, nullptr, &b).final_expectations.sz, 1.0, 1e-10) << n;
    }
  }
  const NoiseTrace b = static_offset(0.9, 4.0, 1e-3);
  EXPECT_LT(simulate_cpmg(build_ramsey(4.0, 0.0, 1.0), nullptr, &b).final_expectations.sz, 0.0);
}

TEST(FiniteWidth, ConvergesToIdealPulses) {
  const SignalSpec sig = SignalSpec::cosine(1.0, 0.3);
  const NoiseTrace b = static_offset(0.4, 4.0, 2.5e-4);
  StepConfig c;
  c.dt = 2.5e-4;
  const double ideal = simulate_cpmg(build_cpmg(8, 4.0, 0.0, 1.0), &sig, &b, c).final_expectations.sz;
  double prev = 1.0;
  for (double w : {0.016, 0.004, 0.001, 0.00025}) {
    const double sz = simulate_cpmg(build_cpmg(8, 4.0, w, 1.0), &sig, &b, c).final_expectations.sz;
    const double err = std::abs(sz - ideal);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LE(prev, 1e-4);
}

TEST(FilterResponse, AnalyticAgainstMidpointOracle) {
  const PulseSequence s = build_cpmg(4, 4.0, 0.0, 1.0);
  const std::vector<double> grid = {0.0, 0.25, 0.5, 0.52, 1.1, 2.7};
  const TransferFunction tf = cpmg_analytic_filter(s, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(tf.values[i].real(), toggling_cosine(s, grid[i]), 1e-6);
    // The toggling function is symmetric about t_f/2 for even n.
    EXPECT_NEAR(tf.values[i].imag(), 0.0, 1e-12);
  }
}

TEST(FilterResponse, SimulationMatchesAnalytic) {
  const PulseSequence s = build_cpmg(4, 4.0, 0.0, 1.0);
  const auto grid = linspace_step(0.0, 2.0, 0.01);
  const CpmgResponse r = cpmg_filter_response(s, grid, 0.01, StepConfig{}, 4);
  const double peak = *std::max_element(r.analytic.begin(), r.analytic.end());
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(r.simulated[i], r.analytic[i], 2e-3 * peak) << grid[i];
  // Finite-window peak sits near n / (2 t_f); the analytic oracle places it at 0.52 MHz.
  EXPECT_NEAR(grid[argmax(r.simulated)], grid[argmax(r.analytic)], 0.0100001);
  EXPECT_NEAR(grid[argmax(r.simulated)], 0.5, 0.03);
}

TEST(FilterResponse, PeakScalesWithPulseCount) {
  const auto grid = linspace_step(0.0, 4.0, 0.01);
  std::vector<double> peaks;
  for (int n : {4, 8, 16, 32}) {
    const auto a = cpmg_analytic_filter(build_cpmg(n, 4.0, 0.0, 1.0), grid);
    std::vector<double> m;
    for (const auto& v : a.values) m.push_back(std::abs(v.real()));
    peaks.push_back(grid[argmax(m)]);
  }
  for (std::size_t i = 1; i < peaks.size(); ++i) EXPECT_NEAR(peaks[i] / peaks[i - 1], 2.0, 0.1) << peaks[i];
}

TEST(FilterResponse, Sidelobes) {
  const auto grid = linspace_step(0.0, 4.0, 0.01);
  for (int n : {1, 2, 4, 8}) {
    const auto a = cpmg_analytic_filter(build_cpmg(n, 4.0, 0.0, 1.0), grid);
    std::vector<double> d;
    for (const auto& v : a.values) d.push_back(v.real() * v.real());
    const std::size_t k = argmax(d);
    double side = 0.0;
    for (std::size_t i = 1; i + 1 < d.size(); ++i)
      if (i != k && d[i] > d[i - 1] && d[i] >= d[i + 1]) {
        side = std::max(side, d[i]);
      }
    EXPECT_GE(side, 0.05 * d[k]) << "n=" << n;
  }
}

TEST(AmplitudeFragility, MonotoneDegradationAndQifClosure) {
  FilterSpec fs;
  fs.centers = {Center{1.35, 0.0, 1.0}};
  const ControlFields q = qif_fields(design_filter(fs), AuxMode::exact_arcsin);
  for (int n : {8, 16, 32}) {
    double prev = 1.0 + 1e-12;
    for (int i = 0; i <= 10; ++i) {
      const double dev = (1.0 / n) * i / 10.0;
      const double lo = simulate_cpmg(build_cpmg(n, 4.0, 0.02, 1.0 - dev), nullptr, nullptr).fidelity;
      const double hi = simulate_cpmg(build_cpmg(n, 4.0, 0.02, 1.0 + dev), nullptr, nullptr).fidelity;
      EXPECT_LE(std::max(lo, hi), prev) << "n=" << n << " dev=" << dev;
      prev = std::min(lo, hi) + 1e-12;
      EXPECT_GE(simulate_protocol(q.scaled(1.0 - dev), nullptr, nullptr).fidelity, 1.0 - 1e-6);
    }
  }
}

TEST(Ramsey, ReadoutReturnsGroundState) {
  EXPECT_NEAR(simulate_cpmg(build_ramsey(4.0, 0.0, 1.0), nullptr, nullptr).final_expectations.sz, 1.0, 1e-12);
  EXPECT_NEAR(simulate_cpmg(build_ramsey(4.0, 0.02, 1.0), nullptr, nullptr).final_expectations.sz, 1.0, 1e-12);
  for (int n : {1, 2, 3, 4}) {
    for (PulseAxis ax : {PulseAxis::x, PulseAxis::y}) {
      EXPECT_NEAR(simulate_cpmg(build_cpmg(n, 4.0, 0.02, 1.0, ax), nullptr, nullptr).final_expectations.sz, 1.0,
                  1e-10);
    }
  }
}
