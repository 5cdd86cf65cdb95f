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

#include "qif/invariant.hpp"

#include <cmath>
#include <cstdio>

#include "qif/error.hpp"
#include "qif/util.hpp"

namespace qif {

const char* to_string(AuxMode m) { return m == AuxMode::exact_arcsin ? "exact_arcsin" : "simplified"; }

AuxMode aux_mode_from_string(const std::string& s) {
  if (s == "exact_arcsin" || s == "exact") return AuxMode::exact_arcsin;
  if (s == "simplified") return AuxMode::simplified;
  throw InvalidInput("mode: unknown auxiliary-field mode '" + s + "'");
}

namespace {

// 5-point Gauss-Legendre on [-1, 1].
constexpr double kGLx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                            0.9061798459386640};
constexpr double kGLw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                            0.2369268850561891};

// sin/cos of alpha with the alpha == pi case made exact.
void alpha_trig(double a, double& s, double& c) {
  if (a == kPi) {
    s = 0.0;
    c = -1.0;
  } else {
    s = std::sin(a);
    c = std::cos(a);
  }
}

std::string time_str(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g us", t);
  return buf;
}

// Field equations at one instant.
void field_equations(const AngleSample& a, double t, double& eps, double& del) {
  if (a.alpha_dot == 0.0) {
    eps = a.beta_dot;
    del = 0.0;
    return;
  }
  const double sb = std::sin(a.beta);
  double sa, ca;
  alpha_trig(a.alpha, sa, ca);
  const double tan_prod = (sa / ca) * std::tan(a.beta);
  if (std::abs(sb) < 1e-12) throw NumericalFailure("field equations singular (sin beta = 0) at t = " + time_str(t));
  if (!(std::abs(tan_prod) >= 1e-12) || !std::isfinite(tan_prod))
    throw NumericalFailure("field equations singular (tan alpha tan beta = 0) at t = " + time_str(t));
  eps = a.beta_dot - a.alpha_dot / tan_prod;
  del = -a.alpha_dot / sb;
  if (!std::isfinite(eps) || !std::isfinite(del))
    throw NumericalFailure("field equations produced a non-finite value at t = " + time_str(t));
}

// Invariant components and their time derivatives from the angles.
void invariant_components(const AngleSample& a, double I[3], double Id[3]) {
  double sa, ca;
  alpha_trig(a.alpha, sa, ca);
  const double sb = std::sin(a.beta), cb = std::cos(a.beta);
  I[0] = -ca;
  I[1] = sa * sb;
  I[2] = sa * cb;
  Id[0] = sa * a.alpha_dot;
  Id[1] = ca * sb * a.alpha_dot + sa * cb * a.beta_dot;
  Id[2] = ca * cb * a.alpha_dot - sa * sb * a.beta_dot;
}

class SampledAngleProfile final : public AngleProfile {
 public:
  SampledAngleProfile(const AuxiliaryFields& aux)
      : alpha_(0.0, aux.dt, aux.alpha),
        beta_(0.0, aux.dt, aux.beta),
        alpha_dot_(0.0, aux.dt, aux.alpha_dot),
        beta_dot_(0.0, aux.dt, aux.beta_dot),
        pi_(aux.alpha_pi),
        t_end_(aux.duration()) {}

  AngleSample at(double t) const override {
    const double tc = std::min(std::max(t, 0.0), t_end_);
    AngleSample s;
    s.alpha = pi_ ? kPi : alpha_.value(tc);
    s.beta = beta_.value(tc);
    s.alpha_dot = pi_ ? 0.0 : alpha_dot_.value(tc);
    s.beta_dot = (t < 0.0 || t > t_end_) ? 0.0 : beta_dot_.value(tc);
    return s;
  }
  bool alpha_is_pi() const override { return pi_; }

 private:
  MonotoneCubic alpha_, beta_, alpha_dot_, beta_dot_;
  bool pi_;
  double t_end_;
};

bool detect_alpha_pi(const AuxiliaryFields& aux) {
  for (std::size_t k = 0; k < aux.size(); ++k)
    if (aux.alpha[k] != kPi || aux.alpha_dot[k] != 0.0) return false;
  return true;
}

}  // namespace

AngleSample KernelAngleProfile::at(double t) const {
  const double h = h_(t);
  const double hd = hd_(t);
  AngleSample s;
  s.alpha = kPi;
  s.alpha_dot = 0.0;
  if (mode_ == AuxMode::exact_arcsin) {
    if (!(std::abs(h) < 1.0)) throw InvalidInput("kernel magnitude reaches 1; arcsin mapping undefined");
    s.beta = -kPi / 2.0 + std::asin(h);
    s.beta_dot = hd / std::sqrt(1.0 - h * h);
  } else {
    s.beta = -kPi / 2.0 + h;
    s.beta_dot = hd;
  }
  return s;
}

std::shared_ptr<const AngleProfile> kernel_profile(const ImpulseResponse& h, AuxMode mode) {
  MonotoneCubic ip = h.interpolant();
  auto value = [ip](double t) { return ip.value(t); };
  auto deriv = [ip](double t) { return ip.derivative(t); };
  return std::make_shared<KernelAngleProfile>(value, deriv, mode);
}

AuxiliaryFields aux_from_profile(std::shared_ptr<const AngleProfile> p, double t_f, std::size_t n, AuxMode mode) {
  if (!p) throw InvalidInput("aux_from_profile: null profile");
  if (n < 3 || !(t_f > 0.0)) throw InvalidInput("aux_from_profile: need t_f > 0 and at least 3 points");
  AuxiliaryFields aux;
  aux.dt = t_f / static_cast<double>(n - 1);
  aux.mode = mode;
  aux.alpha.resize(n);
  aux.beta.resize(n);
  aux.alpha_dot.resize(n);
  aux.beta_dot.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const AngleSample s = p->at(aux.time(k));
    aux.alpha[k] = s.alpha;
    aux.beta[k] = s.beta;
    aux.alpha_dot[k] = s.alpha_dot;
    aux.beta_dot[k] = s.beta_dot;
  }
  aux.alpha_pi = p->alpha_is_pi();
  aux.profile = std::move(p);
  return aux;
}

AuxiliaryFields aux_from_impulse(const ImpulseResponse& h, AuxMode mode) {
  if (h.samples().front() != 0.0 || h.samples().back() != 0.0)
    throw InvalidInput("aux_from_impulse: kernel endpoints must be zero");
  if (mode == AuxMode::exact_arcsin && !(h.peak() < 1.0))
    throw InvalidInput("aux_from_impulse: |H| >= 1 is not allowed in exact_arcsin mode");
  AuxiliaryFields aux = aux_from_profile(kernel_profile(h, mode), h.duration(), h.size(), mode);
  // Pin the boundary values; the kernel endpoints are exactly zero.
  aux.beta.front() = aux.beta.back() = -kPi / 2.0;
  return aux;
}

AuxiliaryFields aux_from_samples(std::vector<double> alpha, std::vector<double> beta, double dt, AuxMode mode) {
  const std::size_t n = alpha.size();
  if (n < 3 || beta.size() != n) throw InvalidInput("aux_from_samples: alpha and beta need equal length >= 3");
  if (!(dt > 0.0)) throw InvalidInput("aux_from_samples: dt must be positive");
  AuxiliaryFields aux;
  aux.dt = dt;
  aux.mode = mode;
  aux.alpha = std::move(alpha);
  aux.beta = std::move(beta);
  auto diff = [&](const std::vector<double>& v) {
    std::vector<double> d(n);
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (v[k + 1] - v[k - 1]) / (2.0 * dt);
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dt);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dt);
    return d;
  };
  aux.alpha_dot = diff(aux.alpha);
  aux.beta_dot = diff(aux.beta);
  aux.alpha_pi = detect_alpha_pi(aux);
  aux.profile = std::make_shared<SampledAngleProfile>(aux);
  return aux;
}

ControlFields fields_from_aux(const AuxiliaryFields& aux) {
  if (!aux.profile || aux.size() < 2) throw InvalidInput("fields_from_aux: empty auxiliary fields");
  ControlFields f;
  f.dt = aux.dt;
  f.epsilon.resize(aux.size());
  f.delta.resize(aux.size());
  for (std::size_t k = 0; k < aux.size(); ++k) {
    AngleSample s{aux.alpha[k], aux.beta[k], aux.alpha_dot[k], aux.beta_dot[k]};
    field_equations(s, aux.time(k), f.epsilon[k], f.delta[k]);
  }
  f.source = std::make_shared<const AuxiliaryFields>(aux);
  return f;
}

ControlFields qif_fields(const ImpulseResponse& h, AuxMode mode) { return fields_from_aux(aux_from_impulse(h, mode)); }

ControlFields ControlFields::from_samples(double dt, std::vector<double> epsilon, std::vector<double> delta) {
  if (epsilon.size() < 2 || delta.size() != epsilon.size())
    throw InvalidInput("control fields need equal-length epsilon and delta with at least 2 samples");
  if (!(dt > 0.0)) throw InvalidInput("control field grid step must be positive");
  for (std::size_t k = 0; k < epsilon.size(); ++k)
    if (!std::isfinite(epsilon[k]) || !std::isfinite(delta[k]))
      throw InvalidInput("control fields must be finite");
  ControlFields f;
  f.dt = dt;
  f.epsilon = std::move(epsilon);
  f.delta = std::move(delta);
  f.eps_interp = std::make_shared<const MonotoneCubic>(0.0, dt, f.epsilon);
  f.delta_interp = std::make_shared<const MonotoneCubic>(0.0, dt, f.delta);
  return f;
}

void ControlFields::at(double t, double& eps, double& del) const {
  const double T = duration();
  const double slack = 1e-12 * std::max(1.0, T);
  if (t < -slack || t > T + slack) {
    eps = del = 0.0;
    return;
  }
  if (source) {
    field_equations(source->at(t), t, eps, del);
  } else {
    eps = eps_interp->value(t);
    del = delta_interp->value(t);
  }
  eps *= epsilon_scale;
}

ControlFields ControlFields::scaled(double s) const {
  ControlFields out = *this;
  out.epsilon_scale = epsilon_scale * s;
  for (double& e : out.epsilon) e *= s;
  return out;
}

std::string ControlFields::to_csv() const {
  std::string out = "t_us,epsilon_rad_per_us,delta_rad_per_us\n";
  for (std::size_t k = 0; k < size(); ++k) {
    out += format_number(time(k)) + ',' + format_number(epsilon[k], 17) + ',' + format_number(delta[k], 17) + '\n';
  }
  return out;
}

InvariantVector invariant_vector(const AuxiliaryFields& aux) {
  InvariantVector iv;
  const std::size_t n = aux.size();
  iv.i1.resize(n);
  iv.i2.resize(n);
  iv.i3.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    double I[3], Id[3];
    invariant_components({aux.alpha[k], aux.beta[k], aux.alpha_dot[k], aux.beta_dot[k]}, I, Id);
    iv.i1[k] = I[0];
    iv.i2[k] = I[1];
    iv.i3[k] = I[2];
  }
  return iv;
}

std::pair<double, double> lr_phase_rate(const AuxiliaryFields& aux, const ControlFields& fields, double t) {
  double I[3], Id[3];
  invariant_components(aux.at(t), I, Id);
  double eps, del;
  fields.at(t, eps, del);
  const double hdotI = -eps * I[0] + del * I[2];
  const double geo = I[0] * Id[1] - I[1] * Id[0];
  double rate[2];
  for (int j = 0; j < 2; ++j) {
    const double sgn = j == 0 ? 1.0 : -1.0;
    const double den = 2.0 * (1.0 - sgn * I[2]);
    if (geo != 0.0 && std::abs(den) < 1e-12)
      throw NumericalFailure("Lewis-Riesenfeld phase rate singular (1 -/+ I3 = 0) at t = " + time_str(t));
    rate[j] = (geo == 0.0 ? 0.0 : geo / den) - sgn * 0.5 * hdotI;
  }
  return {rate[0], rate[1]};
}

LRPhase lr_phase(const AuxiliaryFields& aux, const ControlFields& fields) {
  const std::size_t n = aux.size();
  if (fields.size() != n || std::abs(fields.dt - aux.dt) > 1e-12 * aux.dt)
    throw InvalidInput("lr_phase: auxiliary and control grids differ");
  LRPhase ph;
  ph.phi_plus.assign(n, 0.0);
  ph.phi_minus.assign(n, 0.0);
  const double h = aux.dt / 2.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double mid = aux.time(k) + h;
    double ip = 0.0, im = 0.0;
    for (int q = 0; q < 5; ++q) {
      auto [rp, rm] = lr_phase_rate(aux, fields, mid + h * kGLx[q]);
      ip += kGLw[q] * rp;
      im += kGLw[q] * rm;
    }
    ph.phi_plus[k + 1] = ph.phi_plus[k] + h * ip;
    ph.phi_minus[k + 1] = ph.phi_minus[k] + h * im;
  }
  return ph;
}

std::vector<double> LRPhase::delta_phi() const {
  std::vector<double> d(phi_plus.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = phi_plus[k] - phi_minus[k];
  return d;
}

EigenPair eigenstates(double i1, double i2, double i3) {
  const double nrm = std::sqrt(i1 * i1 + i2 * i2 + i3 * i3);
  if (!(nrm > 0.0)) throw NumericalFailure("eigenstates: zero invariant vector");
  const double r = i3 / nrm;
  if (1.0 - r < 1e-12 || 1.0 + r < 1e-12) throw NumericalFailure("eigenstates: pole at I3/|I| = +-1");
  const std::complex<double> w(i1, -i2);
  EigenPair e;
  e.minus = {-w / (nrm * std::sqrt(2.0 * (1.0 + r))), std::sqrt(0.5 * (1.0 + r))};
  e.plus = {w / (nrm * std::sqrt(2.0 * (1.0 - r))), std::sqrt(0.5 * (1.0 - r))};
  e.lambda_plus = 0.5 * nrm;
  e.lambda_minus = -0.5 * nrm;
  return e;
}

EigenPair eigenstates(const InvariantVector& iv, std::size_t index) {
  if (index >= iv.size()) throw InvalidInput("eigenstates: index out of range");
  return eigenstates(iv.i1[index], iv.i2[index], iv.i3[index]);
}

InvariantCheck verify_invariant(const ControlFields& fields, const AuxiliaryFields& aux, double step_us) {
  if (!(step_us > 0.0)) throw InvalidInput("verify_invariant: step must be positive");
  const double T = aux.duration();
  const auto steps = static_cast<std::size_t>(std::ceil(T / step_us - 1e-9));
  const double dt = T / static_cast<double>(steps);

  // dI/dt = h x I with h = (-eps, 0, Delta).
  auto rhs = [&](double t, const double* I, double* out) {
    double eps, del;
    fields.at(t, eps, del);
    const double h[3] = {-eps, 0.0, del};
    out[0] = h[1] * I[2] - h[2] * I[1];
    out[1] = h[2] * I[0] - h[0] * I[2];
    out[2] = h[0] * I[1] - h[1] * I[0];
  };
  auto param = [&](double t, double* I) {
    double Id[3];
    invariant_components(aux.at(t), I, Id);
  };

  double I[3];
  param(0.0, I);
  const double I0[3] = {I[0], I[1], I[2]};
  const double n0 = std::sqrt(I[0] * I[0] + I[1] * I[1] + I[2] * I[2]);
  InvariantCheck rep;
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = dt * static_cast<double>(s);
    double k1[3], k2[3], k3[3], k4[3], tmp[3];
    rhs(t, I, k1);
    for (int i = 0; i < 3; ++i) tmp[i] = I[i] + 0.5 * dt * k1[i];
    rhs(t + 0.5 * dt, tmp, k2);
    for (int i = 0; i < 3; ++i) tmp[i] = I[i] + 0.5 * dt * k2[i];
    rhs(t + 0.5 * dt, tmp, k3);
    for (int i = 0; i < 3; ++i) tmp[i] = I[i] + dt * k3[i];
    rhs(t + dt, tmp, k4);
    for (int i = 0; i < 3; ++i) I[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    const double tn = (s + 1 == steps) ? T : dt * static_cast<double>(s + 1);
    double P[3];
    param(tn, P);
    double dev = 0.0;
    for (int i = 0; i < 3; ++i) dev = std::max(dev, std::abs(I[i] - P[i]));
    rep.max_deviation = std::max(rep.max_deviation, dev);
    const double nrm = std::sqrt(I[0] * I[0] + I[1] * I[1] + I[2] * I[2]);
    rep.max_norm_drift = std::max(rep.max_norm_drift, std::abs(nrm - n0));
  }
  for (int i = 0; i < 3; ++i) rep.endpoint_mismatch = std::max(rep.endpoint_mismatch, std::abs(I[i] - I0[i]));
  return rep;
}

}  // namespace qif
