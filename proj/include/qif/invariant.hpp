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

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qif/filter.hpp"

namespace qif {

enum class AuxMode { exact_arcsin, simplified };

const char* to_string(AuxMode m);
AuxMode aux_mode_from_string(const std::string& s);

struct AngleSample {
  double alpha = 0.0;
  double beta = 0.0;
  double alpha_dot = 0.0;
  double beta_dot = 0.0;
};

/// Continuous auxiliary angles alpha(t), beta(t) with exact derivatives.
class AngleProfile {
 public:
  virtual ~AngleProfile() = default;
  virtual AngleSample at(double t) const = 0;
  /// True when alpha is identically pi with zero derivative.
  virtual bool alpha_is_pi() const { return false; }
};

/// alpha = pi, beta = -pi/2 + arcsin H(t) (exact) or -pi/2 + H(t) (simplified).
class KernelAngleProfile final : public AngleProfile {
 public:
  using Fn = std::function<double(double)>;
  KernelAngleProfile(Fn h, Fn h_dot, AuxMode mode) : h_(std::move(h)), hd_(std::move(h_dot)), mode_(mode) {}
  AngleSample at(double t) const override;
  bool alpha_is_pi() const override { return true; }
  AuxMode mode() const { return mode_; }

 private:
  Fn h_, hd_;
  AuxMode mode_;
};

/// Arbitrary closed-form angles, used for general-alpha protocols.
class FunctionAngleProfile final : public AngleProfile {
 public:
  explicit FunctionAngleProfile(std::function<AngleSample(double)> f) : f_(std::move(f)) {}
  AngleSample at(double t) const override { return f_(t); }

 private:
  std::function<AngleSample(double)> f_;
};

struct AuxiliaryFields {
  double dt = 0.0;  // grid step, grid is k*dt for k in [0, n)
  std::vector<double> alpha, beta, alpha_dot, beta_dot;
  AuxMode mode = AuxMode::exact_arcsin;
  bool alpha_pi = false;
  std::shared_ptr<const AngleProfile> profile;  // continuous angles; interpolated for sampled input

  std::size_t size() const { return alpha.size(); }
  double time(std::size_t k) const { return dt * static_cast<double>(k); }
  double duration() const { return dt * static_cast<double>(size() - 1); }
  AngleSample at(double t) const { return profile->at(t); }
};

struct ControlFields {
  double dt = 0.0;
  std::vector<double> epsilon, delta;  // rad/us
  double epsilon_scale = 1.0;          // amplitude miscalibration s, applies to epsilon only
  std::shared_ptr<const AuxiliaryFields> source;
  std::shared_ptr<const MonotoneCubic> eps_interp, delta_interp;  // used when source is null

  std::size_t size() const { return epsilon.size(); }
  double time(std::size_t k) const { return dt * static_cast<double>(k); }
  double duration() const { return dt * static_cast<double>(size() - 1); }
  /// Field values at arbitrary t in [0, t_f]; exact when the source has a
  /// continuous profile, monotone-cubic resampled otherwise. Zero outside.
  void at(double t, double& eps, double& del) const;
  ControlFields scaled(double s) const;

  /// Fields given only as samples (no auxiliary source).
  static ControlFields from_samples(double dt, std::vector<double> epsilon, std::vector<double> delta);

  std::string to_csv() const;
};

struct InvariantVector {
  std::vector<double> i1, i2, i3;  // unit-norm components; the operator is I = (i . sigma)/2
  std::size_t size() const { return i1.size(); }
};

struct LRPhase {
  std::vector<double> phi_plus, phi_minus;
  std::vector<double> delta_phi() const;
};

using Spinor = std::array<std::complex<double>, 2>;

struct EigenPair {
  Spinor plus, minus;
  double lambda_plus = 0.0, lambda_minus = 0.0;
};

struct InvariantCheck {
  double max_deviation = 0.0;   // |I_numeric - I_parametrized| over the grid
  double max_norm_drift = 0.0;  // | |I_numeric| - |I(0)| |
  double endpoint_mismatch = 0.0;  // |I_numeric(t_f) - I(0)|
};

/// Continuous profile of a kernel (its monotone cubic interpolant).
std::shared_ptr<const AngleProfile> kernel_profile(const ImpulseResponse& h, AuxMode mode);

AuxiliaryFields aux_from_impulse(const ImpulseResponse& h, AuxMode mode);
/// Samples a continuous profile on n points over [0, t_f].
AuxiliaryFields aux_from_profile(std::shared_ptr<const AngleProfile> p, double t_f, std::size_t n,
                                 AuxMode mode = AuxMode::exact_arcsin);
/// Sampled angles; derivatives from centered differences, one-sided at the ends.
AuxiliaryFields aux_from_samples(std::vector<double> alpha, std::vector<double> beta, double dt,
                                 AuxMode mode = AuxMode::exact_arcsin);

ControlFields fields_from_aux(const AuxiliaryFields& aux);
/// Convenience: kernel -> aux -> fields.
ControlFields qif_fields(const ImpulseResponse& h, AuxMode mode);

InvariantVector invariant_vector(const AuxiliaryFields& aux);
/// Phase rates d(phi_plus)/dt, d(phi_minus)/dt at time t.
std::pair<double, double> lr_phase_rate(const AuxiliaryFields& aux, const ControlFields& fields, double t);
LRPhase lr_phase(const AuxiliaryFields& aux, const ControlFields& fields);

EigenPair eigenstates(double i1, double i2, double i3);
EigenPair eigenstates(const InvariantVector& iv, std::size_t index);

InvariantCheck verify_invariant(const ControlFields& fields, const AuxiliaryFields& aux, double step_us = 1e-3);

}  // namespace qif
