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
#include <memory>
#include <vector>

#include "qif/dynamics.hpp"
#include "qif/error.hpp"
#include "qif/filter.hpp"
#include "qif/invariant.hpp"
#include "qif/response.hpp"
#include "qif/util.hpp"

using namespace qif;

namespace {

ImpulseResponse kernel(double f0 = 1.35, double phase = 0.0) {
  FilterSpec s;
  s.centers = {Center{f0, phase, 1.0}};
  return design_filter(s);
}

// Trapezoid of f_in(t) * H(t) on a grid `refine` times finer than the
// kernel's, with H from the kernel interpolant (cos(beta) = H in exact mode).
double overlap_oracle(const ImpulseResponse& h, const SignalSpec& sig, int refine) {
  const double tf = h.duration();
  const std::size_t m = (h.size() - 1) * refine + 1;
  const double dt = tf / double(m - 1);
  double acc = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double t = dt * double(k);
    const double w = (k == 0 || k + 1 == m) ? 0.5 : 1.0;
    acc += w * sig.shape(t, tf) * h.interpolant()(t);
  }
  return acc * dt;
}

// 8-point composite Gauss-Legendre on 2000 panels.
template <class F>
double gauss(F f, double a, double b) {
  static const double x[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
  static const double w[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
  const int panels = 2000;
  const double h = (b - a) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + h * (p + 0.5);
    for (int i = 0; i < 4; ++i) acc += w[i] * (f(c - 0.5 * h * x[i]) + f(c + 0.5 * h * x[i]));
  }
  return acc * 0.5 * h;
}

}  // namespace

TEST(SecondOrder, MatchesRefinedQuadrature) {
  const ImpulseResponse h = kernel();
  const AuxiliaryFields aux = aux_from_impulse(h, AuxMode::exact_arcsin);
  const SignalSpec sig = SignalSpec::cosine(1.35, 0.05);
  const double A = overlap_oracle(h, sig, 10);
  const double expect = -0.5 * 0.05 * 0.05 * A * A;
  EXPECT_NEAR(second_order_deficit(aux, sig) / expect, 1.0, 1e-4);
  EXPECT_NEAR(second_order_deficit(aux, sig, Quadrature{10}) / expect, 1.0, 1e-8);
}

TEST(SecondOrder, StopBandAndZeroAmplitude) {
  const AuxiliaryFields aux = aux_from_impulse(kernel(), AuxMode::exact_arcsin);
  const double on = second_order_deficit(aux, SignalSpec::cosine(1.35, 0.05));
  const double off = second_order_deficit(aux, SignalSpec::cosine(4.0, 0.05));
  EXPECT_LT(on, 0.0);
  EXPECT_LE(std::abs(off), 0.01 * std::abs(on));
  EXPECT_EQ(second_order_deficit(aux, SignalSpec::cosine(1.35, 0.0)), 0.0);
}

TEST(SecondOrder, RejectsGeneralAlpha) {
  std::vector<double> a(11), b(11, -1.0);
  for (int k = 0; k < 11; ++k) a[k] = 3.0 + 0.01 * k;
  const AuxiliaryFields aux = aux_from_samples(a, b, 0.1);
  EXPECT_THROW(second_order_deficit(aux, SignalSpec::cosine(1.0, 0.1)), InvalidInput);
  EXPECT_THROW(magnus_predict(aux, SignalSpec::cosine(1.0, 0.1)), InvalidInput);
}

TEST(Convolution, EqualsSecondOrderForSymmetricKernels) {
  for (double f0 : {0.8, 1.35, 2.6}) {
    const ImpulseResponse h = kernel(f0);
    const AuxiliaryFields aux = aux_from_impulse(h, AuxMode::exact_arcsin);
    for (double f : {0.5, f0, f0 + 0.1, 3.3}) {
      const SignalSpec sig = SignalSpec::cosine(f, 0.05);
      const ConvolutionResult c = convolution_amplitude(h, sig);
      EXPECT_FALSE(c.symmetry_warning);
      const double d = second_order_deficit(aux, sig);
      EXPECT_NEAR(-0.5 * c.value * c.value, d, 1e-10 * std::abs(d) + 1e-300);
    }
  }
}

TEST(Convolution, SpectralProduct) {
  const ImpulseResponse h = kernel();
  const auto grid = linspace_step(1.2, 1.5, 0.01);
  const auto F = transfer_function(h, grid).magnitude();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double c = convolution_amplitude(h, SignalSpec::cosine(grid[i], 0.05)).value;
    EXPECT_NEAR(std::abs(c), 0.05 * F[i], 0.02 * 0.05 * F[i]);
  }
}

TEST(Convolution, ZeroKernelAndSineNull) {
  const ImpulseResponse z(std::vector<double>(1001, 0.0), 250.0);
  EXPECT_EQ(convolution_amplitude(z, SignalSpec::cosine(1.35, 0.05)).value, 0.0);
  const ImpulseResponse h = kernel();
  const double on = convolution_amplitude(h, SignalSpec::cosine(1.35, 0.05)).value;
  const double sine = convolution_amplitude(h, SignalSpec::sine(1.35, 0.05)).value;
  EXPECT_LE(std::abs(sine), 1e-10 * std::abs(on));
}

TEST(Convolution, AsymmetricKernelWarns) {
  const ImpulseResponse h = kernel(1.35, 0.7);
  EXPECT_TRUE(convolution_amplitude(h, SignalSpec::cosine(1.35, 0.05)).symmetry_warning);
}

TEST(PhaseLaw, SineSquaredShape) {
  FilterSpec lp;
  lp.kind = FilterKind::lowpass;
  const ImpulseResponse env = design_filter(lp);
  std::vector<double> phases;
  for (int i = 0; i < 24; ++i) phases.push_back(kTwoPi * i / 24.0);
  const SignalSpec sig = SignalSpec::sine(1.35, 0.05);
  const PhaseLawResult r = phase_law(env, 1.35, phases, sig);
  EXPECT_FALSE(r.slow_carrier_warning);
  EXPECT_LE(r.values[0], 1e-12 * r.constant);
  EXPECT_EQ(std::max_element(r.values.begin(), r.values.end()) - r.values.begin(), 6);
  // Least-squares fit of values = c sin^2(phi): c = sum v s / sum s^2.
  double num = 0, den = 0, mean = 0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const double s = std::pow(std::sin(phases[i]), 2);
    num += r.values[i] * s;
    den += s * s;
    mean += r.values[i] / phases.size();
  }
  const double c = num / den;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    ss_res += std::pow(r.values[i] - c * std::pow(std::sin(phases[i]), 2), 2);
    ss_tot += std::pow(r.values[i] - mean, 2);
  }
  EXPECT_GE(1.0 - ss_res / ss_tot, 0.99);
  EXPECT_NEAR(c / r.constant, 1.0, 0.02);
  EXPECT_LE(r.max_fit_residual, 0.02);
}

TEST(PhaseLaw, SlowCarrierWarningAndErrors) {
  FilterSpec lp;
  lp.kind = FilterKind::lowpass;
  const ImpulseResponse env = design_filter(lp);
  EXPECT_TRUE(phase_law(env, 0.3, {0.0, 1.0}, SignalSpec::sine(0.3, 0.05)).slow_carrier_warning);
  EXPECT_THROW(phase_law(env, 1.35, {0.0}, SignalSpec::cosine(1.35, 0.05)), InvalidInput);
  EXPECT_THROW(phase_law(env, 1.35, {}, SignalSpec::sine(1.35, 0.05)), InvalidInput);
}

TEST(FirstOrder, AlphaPiNullsFirstOrder) {
  const AuxiliaryFields aux = aux_from_impulse(kernel(), AuxMode::exact_arcsin);
  const ControlFields f = fields_from_aux(aux);
  const LRPhase lr = lr_phase(aux, f);
  const ResponsePrediction p = first_order(aux, lr, SignalSpec::cosine(1.35, 0.05));
  EXPECT_EQ(p.A1, 0.0);
  EXPECT_EQ(p.sigma_y_shift, 0.0);
  EXPECT_EQ(p.sigma_z_shift, 0.0);
  const ResponsePrediction z = first_order(aux, lr, SignalSpec::cosine(1.35, 0.0));
  EXPECT_EQ(z.sigma_x_shift, 0.0);
  EXPECT_EQ(z.sigma_y_shift, 0.0);
  EXPECT_EQ(z.sigma_z_shift, 0.0);
}

TEST(FirstOrder, GeneralAlphaAmplitudeAgainstQuadrature) {
  const double T = 4.0;
  auto p = std::make_shared<FunctionAngleProfile>([T](double t) {
    AngleSample s;
    s.alpha = kPi - 0.2 * std::sin(kPi * t / T);
    s.alpha_dot = -0.2 * kPi / T * std::cos(kPi * t / T);
    s.beta = -kPi / 2.0 + 0.4 * std::sin(kPi * t / T);
    s.beta_dot = 0.4 * kPi / T * std::cos(kPi * t / T);
    return s;
  });
  const AuxiliaryFields aux = aux_from_profile(p, T, 4001);
  LRPhase lr;
  lr.phi_plus.assign(aux.size(), 0.0);
  lr.phi_minus.assign(aux.size(), 0.0);
  const SignalSpec sig = SignalSpec::cosine(0.5, 0.05);
  const ResponsePrediction r = first_order(aux, lr, sig, Quadrature{20});
  const double oracle = gauss(
      [&](double t) {
        const AngleSample a = p->at(t);
        return sig.shape(t, T) * std::sin(a.alpha) * std::cos(a.beta);
      },
      0.0, T);
  EXPECT_NEAR(r.A1, oracle, 1e-8);
  EXPECT_NE(r.A1, 0.0);
}

TEST(Magnus, SmallAmplitudeLimit) {
  const AuxiliaryFields aux = aux_from_impulse(kernel(), AuxMode::exact_arcsin);
  for (double f : {1.2, 1.35, 1.5}) {
    const ResponsePrediction p = magnus_predict(aux, SignalSpec::cosine(f, 0.0125));
    const double second = p.second_order_sz - 1.0;
    EXPECT_NEAR((p.magnus_sz - 1.0) / second, 1.0, 1e-3);
    EXPECT_GE(p.magnus_sz, -1.0);
    EXPECT_LE(p.magnus_sz, 1.0);
    // Closed form: 1 - 2 sin^2(gamma) sin^2|z|.
    EXPECT_NEAR(p.magnus_sz,
                1.0 - 2.0 * std::pow(std::sin(p.magnus_gamma) * std::sin(p.magnus_z_abs), 2), 1e-15);
  }
}

TEST(Magnus, DegenerateCases) {
  const AuxiliaryFields aux = aux_from_impulse(kernel(), AuxMode::exact_arcsin);
  const ResponsePrediction zero = magnus_predict(aux, SignalSpec::cosine(1.35, 0.0));
  EXPECT_EQ(zero.magnus_sz, 1.0);
  const ImpulseResponse h(std::vector<double>(101, 0.0), 25.0);
  const AuxiliaryFields idle = aux_from_impulse(h, AuxMode::exact_arcsin);
  // cos(beta) = 0 everywhere: A = 0, gamma = 0, no deviation.
  const ResponsePrediction q = magnus_predict(idle, SignalSpec::cosine(1.0, 0.3));
  EXPECT_NEAR(q.A2, 0.0, 1e-15);
  EXPECT_NEAR(q.magnus_sz, 1.0, 1e-15);
  const ResponsePrediction off = magnus_predict(aux, SignalSpec::cosine(3.9, 0.05));
  const ResponsePrediction on = magnus_predict(aux, SignalSpec::cosine(1.35, 0.05));
  EXPECT_LE(1.0 - off.magnus_sz, 0.01 * (1.0 - on.magnus_sz));
}

TEST(Magnus, MatchesExactSimulationToFirstExtremum) {
  // On-band amplitude sweep at f0 = 2 MHz, t_f = 4 us.
  const ImpulseResponse h = kernel(2.0);
  const AuxiliaryFields aux = aux_from_impulse(h, AuxMode::exact_arcsin);
  const ControlFields f = fields_from_aux(aux);
  std::vector<double> d, sim, mag;
  for (double delta = 0.05; delta <= 3.0 + 1e-9; delta += 0.05) {
    const SignalSpec sig = SignalSpec::cosine(2.0, delta);
    d.push_back(delta);
    sim.push_back(simulate_protocol(f, &sig, nullptr).final_expectations.sz);
    mag.push_back(magnus_predict(aux, sig, Quadrature{4}).magnus_sz);
  }
  std::size_t first = 0;
  while (first + 1 < sim.size() && sim[first + 1] < sim[first]) ++first;
  ASSERT_GT(first, 3u) << "no extremum before delta = " << d[first];
  for (std::size_t i = 0; i <= first; ++i) {
    const double dsim = 1.0 - sim[i], dmag = 1.0 - mag[i];
    EXPECT_LE(std::abs(dmag - dsim), 0.05 * dsim) << "delta=" << d[i];
  }
  // Quadratic near zero: deficit ratio at doubled amplitude is about 4.
  EXPECT_NEAR((1.0 - sim[1]) / (1.0 - sim[0]), 4.0, 0.05);
}
