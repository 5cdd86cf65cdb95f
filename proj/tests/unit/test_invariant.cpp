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
#include <memory>
#include <random>

#include "qif/dynamics.hpp"
#include "qif/error.hpp"
#include "qif/filter.hpp"
#include "qif/invariant.hpp"
#include "qif/util.hpp"

using namespace qif;
using cd = std::complex<double>;

namespace {

ImpulseResponse kernel(double f0 = 1.35) {
  FilterSpec s;
  s.centers = {Center{f0, 0.0, 1.0}};
  return design_filter(s);
}

double final_sz(const ControlFields& f, double dt = 1e-3) {
  StepConfig c;
  c.dt = dt;
  return simulate_protocol(f, nullptr, nullptr, c).final_expectations.sz;
}

// Test profile with a time-dependent alpha; boundary conditions are not needed here.
std::shared_ptr<const AngleProfile> general_profile(double T) {
  return std::make_shared<FunctionAngleProfile>([T](double t) {
    const double w = kPi / T;
    AngleSample s;
    s.alpha = kPi - 0.2 - 0.2 * std::sin(w * t);
    s.alpha_dot = -0.2 * w * std::cos(w * t);
    s.beta = -kPi / 2.0 + 0.3 + 0.5 * std::sin(w * t);
    s.beta_dot = 0.5 * w * std::cos(w * t);
    return s;
  });
}

// Eigenvector of (n . sigma)/2 for eigenvalue sign*|n|/2, phased so the lower
// component is real and positive (the library's gauge).
std::array<cd, 2> oracle_eigvec(double n1, double n2, double n3, int sign) {
  const double r = std::sqrt(n1 * n1 + n2 * n2 + n3 * n3);
  // (M - lambda) v = 0 with M = [[n3, n1 - i n2], [n1 + i n2, -n3]] / 2.
  std::array<cd, 2> v = {cd(n1, -n2), cd(sign * r - n3, 0.0)};
  const double nv = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
  const cd ph = std::abs(v[1]) > 0 ? std::conj(v[1]) / std::abs(v[1]) : 1.0;
  return {v[0] * ph / nv, v[1] * ph / nv};
}

}  // namespace

TEST(AuxFields, ZeroKernelIsIdentityProtocol) {
  const ImpulseResponse h(std::vector<double>(101, 0.0), 25.0);
  const AuxiliaryFields aux = aux_from_impulse(h, AuxMode::exact_arcsin);
  EXPECT_TRUE(aux.alpha_pi);
  for (std::size_t k = 0; k < aux.size(); ++k) {
    EXPECT_EQ(aux.alpha[k], kPi);
    EXPECT_EQ(aux.beta[k], -kPi / 2.0);
  }
  const ControlFields f = fields_from_aux(aux);
  for (std::size_t k = 0; k < f.size(); ++k) {
    EXPECT_EQ(f.epsilon[k], 0.0);
    EXPECT_EQ(f.delta[k], 0.0);
  }
}

TEST(AuxFields, ArcsinPeak) {
  const ImpulseResponse h = kernel();
  const AuxiliaryFields ex = aux_from_impulse(h, AuxMode::exact_arcsin);
  const AuxiliaryFields sm = aux_from_impulse(h, AuxMode::simplified);
  double mx = -10, ms = -10;
  for (std::size_t k = 0; k < ex.size(); ++k) {
    mx = std::max(mx, ex.beta[k] + kPi / 2.0);
    ms = std::max(ms, sm.beta[k] + kPi / 2.0);
  }
  EXPECT_NEAR(mx, 1.1198, 5e-5);
  EXPECT_NEAR(mx, std::asin(0.9), 1e-14);
  EXPECT_NEAR(ms, 0.9, 1e-14);
}

TEST(AuxFields, RejectsPeakAtOneInExactMode) {
  std::vector<double> v(101, 0.0);
  v[50] = 1.0;
  const ImpulseResponse h(v, 25.0);
  EXPECT_THROW(aux_from_impulse(h, AuxMode::exact_arcsin), InvalidInput);
  EXPECT_NO_THROW(aux_from_impulse(h, AuxMode::simplified));
}

TEST(FieldEquations, AlphaPiReduction) {
  const ImpulseResponse h = kernel();
  for (AuxMode m : {AuxMode::exact_arcsin, AuxMode::simplified}) {
    const AuxiliaryFields aux = aux_from_impulse(h, m);
    const ControlFields f = fields_from_aux(aux);
    for (std::size_t k = 0; k < f.size(); ++k) {
      EXPECT_EQ(f.delta[k], 0.0);
      EXPECT_EQ(f.epsilon[k], aux.beta_dot[k]);
    }
  }
}

TEST(FieldEquations, KernelDerivativeForms) {
  const ImpulseResponse h = kernel();
  const MonotoneCubic& ip = h.interpolant();
  const ControlFields fs = qif_fields(h, AuxMode::simplified);
  const ControlFields fe = qif_fields(h, AuxMode::exact_arcsin);
  for (std::size_t k = 1; k + 1 < h.size(); k += 7) {
    const double t = h.time(k), H = h.samples()[k], Hd = ip.derivative(t);
    EXPECT_NEAR(fs.epsilon[k], Hd, 1e-12);
    EXPECT_NEAR(fe.epsilon[k], Hd / std::sqrt(1.0 - H * H), 1e-12);
    // Finite-difference check of the interpolant derivative itself.
    const double d = 1e-7;
    EXPECT_NEAR(Hd, (ip(t + d) - ip(t - d)) / (2 * d), 1e-4 * std::max(1.0, std::abs(Hd)));
  }
}

TEST(FieldEquations, GeneralAlphaMatchesClosedForm) {
  const double T = 4.0;
  const AuxiliaryFields aux = aux_from_profile(general_profile(T), T, 401);
  const ControlFields f = fields_from_aux(aux);
  EXPECT_FALSE(aux.alpha_pi);
  for (std::size_t k = 0; k < aux.size(); k += 13) {
    const double a = aux.alpha[k], b = aux.beta[k], ad = aux.alpha_dot[k], bd = aux.beta_dot[k];
    EXPECT_NEAR(f.epsilon[k], bd - ad / (std::tan(a) * std::tan(b)), 1e-9);
    EXPECT_NEAR(f.delta[k], -ad / std::sin(b), 1e-9);
  }
}

TEST(FieldEquations, SingularPointReported) {
  // beta crosses 0 while alpha moves: sin(beta) = 0 there.
  auto p = std::make_shared<FunctionAngleProfile>([](double t) {
    AngleSample s;
    s.alpha = kPi - 0.3 - 0.1 * t;
    s.alpha_dot = -0.1;
    s.beta = t - 1.0;
    s.beta_dot = 1.0;
    return s;
  });
  const AuxiliaryFields aux = aux_from_profile(p, 2.0, 5);
  try {
    fields_from_aux(aux);
    FAIL();
  } catch (const NumericalFailure& e) {
    EXPECT_NE(std::string(e.what()).find("t = 1"), std::string::npos) << e.what();
  }
}

TEST(Invariant, UnitNormAndBoundary) {
  const AuxiliaryFields aux = aux_from_impulse(kernel(), AuxMode::exact_arcsin);
  const InvariantVector iv = invariant_vector(aux);
  for (std::size_t k = 0; k < iv.size(); ++k)
    EXPECT_NEAR(iv.i1[k] * iv.i1[k] + iv.i2[k] * iv.i2[k] + iv.i3[k] * iv.i3[k], 1.0, 1e-10);
  EXPECT_EQ(iv.i1.front(), 1.0);
  EXPECT_EQ(iv.i1.back(), 1.0);
}

TEST(LRPhase, AlphaPiPhaseIdentity) {
  for (AuxMode m : {AuxMode::exact_arcsin, AuxMode::simplified}) {
    const AuxiliaryFields aux = aux_from_impulse(kernel(), m);
    const ControlFields f = fields_from_aux(aux);
    const auto dphi = lr_phase(aux, f).delta_phi();
    double mx = 0.0;
    for (std::size_t k = 0; k < aux.size(); ++k) {
      EXPECT_LE(std::abs(dphi[k] - dphi[0] - (aux.beta[k] - aux.beta[0])), 1e-8);
      mx = std::max(mx, dphi[k] - dphi[0]);
    }
    EXPECT_NEAR(dphi.back(), dphi.front(), 1e-8);
    if (m == AuxMode::simplified) {
      EXPECT_NEAR(mx, 0.9, 1e-8);
    }
  }
}

TEST(LRPhase, GeneralAlphaRateAgainstGaugeOracle) {
  const double T = 4.0;
  const AuxiliaryFields aux = aux_from_profile(general_profile(T), T, 2001);
  const ControlFields f = fields_from_aux(aux);
  const LRPhase ph = lr_phase(aux, f);
  for (double t = 0.11; t < T - 0.1; t += 0.29) {
    // Oracle: d(phi)/dt = <phi| i d/dt - H |phi> from finite differences of
    // independently computed eigenvectors.
    const double h = 1e-5;
    auto vec = [&](double tt, int sign) {
      const AngleSample a = aux.at(tt);
      return oracle_eigvec(-std::cos(a.alpha), std::sin(a.alpha) * std::sin(a.beta),
                           std::sin(a.alpha) * std::cos(a.beta), sign);
    };
    double eps, del;
    f.at(t, eps, del);
    const auto [rp, rm] = lr_phase_rate(aux, f, t);
    for (int sign : {+1, -1}) {
      const auto v = vec(t, sign), vp = vec(t + h, sign), vm = vec(t - h, sign);
      cd geo = 0.0;
      for (int i = 0; i < 2; ++i) geo += std::conj(v[i]) * (vp[i] - vm[i]) / (2 * h);
      // H = (x sigma_x + z sigma_z)/2 with x = -eps, z = Delta.
      const cd Hv0 = 0.5 * (-eps * v[1] + del * v[0]);
      const cd Hv1 = 0.5 * (-eps * v[0] - del * v[1]);
      const cd expH = std::conj(v[0]) * Hv0 + std::conj(v[1]) * Hv1;
      const double oracle = (cd(0, 1) * geo - expH).real();
      EXPECT_NEAR(sign > 0 ? rp : rm, oracle, 1e-6) << "t=" << t << " sign=" << sign;
    }
    // The accumulated phase is the integral of the rate.
    const std::size_t k = static_cast<std::size_t>(std::round(t / aux.dt));
    const double fd = (ph.phi_plus[k + 1] - ph.phi_plus[k - 1]) / (2 * aux.dt);
    EXPECT_NEAR(fd, lr_phase_rate(aux, f, aux.time(k)).first, 1e-6);
  }
}

TEST(Eigenstates, XAxisInvariant) {
  const EigenPair e = eigenstates(1.0, 0.0, 0.0);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(e.plus[0] - r), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(e.plus[1] - r), 0.0, 1e-15);
  // |0> = (|phi+> - |phi->)/sqrt(2).
  const cd c0 = (e.plus[0] - e.minus[0]) * r, c1 = (e.plus[1] - e.minus[1]) * r;
  EXPECT_NEAR(std::abs(c0 - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c1), 0.0, 1e-15);
}

TEST(Eigenstates, RandomVectorsAgainstDirectSolve) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int i = 0; i < 200; ++i) {
    double n[3] = {g(rng), g(rng), g(rng)};
    const double r = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    for (double& x : n) x /= r;
    const EigenPair e = eigenstates(n[0], n[1], n[2]);
    // Eigenvalues of the traceless 2x2 matrix: +-sqrt(-det).
    EXPECT_NEAR(e.lambda_plus, 0.5, 1e-15);
    EXPECT_NEAR(e.lambda_minus, -0.5, 1e-15);
    const cd M[2][2] = {{0.5 * n[2], 0.5 * cd(n[0], -n[1])}, {0.5 * cd(n[0], n[1]), -0.5 * n[2]}};
    for (int s : {+1, -1}) {
      const Spinor& v = s > 0 ? e.plus : e.minus;
      const double lam = s > 0 ? e.lambda_plus : e.lambda_minus;
      double res = 0.0;
      for (int a = 0; a < 2; ++a) res += std::norm(M[a][0] * v[0] + M[a][1] * v[1] - lam * v[a]);
      EXPECT_LE(std::sqrt(res), 1e-10);
      const auto o = oracle_eigvec(n[0], n[1], n[2], s);
      EXPECT_NEAR(std::abs(std::conj(o[0]) * v[0] + std::conj(o[1]) * v[1]), 1.0, 1e-10);
    }
    EXPECT_LE(std::abs(std::conj(e.plus[0]) * e.minus[0] + std::conj(e.plus[1]) * e.minus[1]), 1e-10);
  }
  EXPECT_THROW(eigenstates(0.0, 0.0, 1.0), NumericalFailure);
  EXPECT_THROW(eigenstates(0.0, 0.0, 0.0), NumericalFailure);
}

TEST(Eigenstates, ConstantEigenvaluesAlongProtocol) {
  const AuxiliaryFields aux = aux_from_impulse(kernel(), AuxMode::exact_arcsin);
  const InvariantVector iv = invariant_vector(aux);
  const EigenPair e0 = eigenstates(iv, 0);
  for (std::size_t k = 0; k < iv.size(); k += 11) {
    const EigenPair e = eigenstates(iv, k);
    EXPECT_NEAR(e.lambda_plus, e0.lambda_plus, 1e-10);
    EXPECT_NEAR(e.lambda_minus, e0.lambda_minus, 1e-10);
    EXPECT_LE(std::abs(std::conj(e.plus[0]) * e.minus[0] + std::conj(e.plus[1]) * e.minus[1]), 1e-10);
  }
}

TEST(VerifyInvariant, QifFieldsConserveTheInvariant) {
  const AuxiliaryFields aux = aux_from_impulse(kernel(), AuxMode::exact_arcsin);
  const ControlFields f = fields_from_aux(aux);
  const InvariantCheck c = verify_invariant(f, aux, 1e-3);
  const InvariantCheck fine = verify_invariant(f, aux, 1e-4);
  EXPECT_LE(c.max_norm_drift, 1e-6);
  EXPECT_LE(c.max_deviation, 1e-6);
  EXPECT_LE(std::abs(c.max_deviation - fine.max_deviation), 1e-6);
  EXPECT_LE(c.endpoint_mismatch, 1e-6);
}

TEST(VerifyInvariant, IdleFieldsKeepTheInvariantExactly) {
  const ImpulseResponse h(std::vector<double>(201, 0.0), 50.0);
  const AuxiliaryFields aux = aux_from_impulse(h, AuxMode::exact_arcsin);
  const InvariantCheck c = verify_invariant(fields_from_aux(aux), aux);
  EXPECT_EQ(c.max_deviation, 0.0);
  EXPECT_EQ(c.max_norm_drift, 0.0);
}

TEST(VerifyInvariant, ScaledFields) {
  // With alpha = pi the invariant vector is the fixed point (1, 0, 0) of
  // h x I for any epsilon, so scaling leaves it untouched.
  const AuxiliaryFields aux = aux_from_impulse(kernel(), AuxMode::exact_arcsin);
  const InvariantCheck c = verify_invariant(fields_from_aux(aux).scaled(1.3), aux);
  EXPECT_LE(c.max_deviation, 1e-12);
  EXPECT_LE(c.endpoint_mismatch, 1e-12);
  // A general-alpha protocol does leave its parametrization when scaled.
  const AuxiliaryFields g = aux_from_profile(general_profile(4.0), 4.0, 801);
  const ControlFields fg = fields_from_aux(g);
  EXPECT_LE(verify_invariant(fg, g).max_deviation, 1e-6);
  const InvariantCheck cs = verify_invariant(fg.scaled(1.3), g);
  EXPECT_GT(cs.max_deviation, 1e-2);
  EXPECT_LE(cs.max_norm_drift, 1e-6);
}

TEST(Closure, RandomSpecsReturnToGround) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> f0(0.5, 3.0);
  for (int i = 0; i < 4; ++i) EXPECT_GE(final_sz(qif_fields(kernel(f0(rng)), AuxMode::exact_arcsin)), 1.0 - 1e-6);
}

TEST(Closure, AmplitudeScaling) {
  const ControlFields f = qif_fields(kernel(), AuxMode::exact_arcsin);
  for (double s : {0.5, 0.75, 1.0, 1.25, 1.5}) EXPECT_GE(final_sz(f.scaled(s)), 1.0 - 1e-6) << s;
}

TEST(ControlFieldsSamples, ResampledAndScaled) {
  const ControlFields f = ControlFields::from_samples(0.5, {0.0, 1.0, 2.0, 1.0, 0.0}, {0.0, 0.0, 0.0, 0.0, 0.0});
  double e, d;
  f.at(1.0, e, d);
  EXPECT_EQ(e, 2.0);
  f.scaled(0.5).at(1.0, e, d);
  EXPECT_EQ(e, 1.0);
  f.at(3.0, e, d);
  EXPECT_EQ(e, 0.0);
  EXPECT_THROW(ControlFields::from_samples(0.5, {0.0, 1.0}, {0.0}), InvalidInput);
}
