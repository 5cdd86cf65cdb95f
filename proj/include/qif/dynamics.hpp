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
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qif/invariant.hpp"
#include "qif/noise.hpp"
#include "qif/response.hpp"

namespace qif {

using QubitState = Spinor;

QubitState basis0();
QubitState basis1();
/// Eigenstate of sigma_x with eigenvalue +1.
QubitState plus_x();

/// Instantaneous rotation exp(-i angle (n . sigma) / 2) applied before segment
/// `before_segment` (== segment count means after the last one).
struct Kick {
  std::size_t before_segment = 0;
  double nx = 1.0, ny = 0.0, nz = 0.0;
  double angle = 0.0;
};

/// Piecewise-constant H = (x sigma_x + y sigma_y + z sigma_z)/2 on a grid of
/// segment boundaries, plus optional instantaneous kicks.
struct HamiltonianTrace {
  std::vector<double> grid;  // segment boundaries, size = segments + 1
  std::vector<double> x, y, z;
  std::vector<Kick> kicks;

  std::size_t segments() const { return x.size(); }
  double duration() const { return grid.empty() ? 0.0 : grid.back() - grid.front(); }
  /// Throws InvalidInput on inconsistent sizes, non-finite entries or a
  /// non-uniform grid.
  void validate() const;
};

enum class Sampling { midpoint, left };

struct StepConfig {
  double dt = 1e-3;  // us
  Sampling sampling = Sampling::midpoint;
  bool trajectory_store = false;
};

struct Expectations {
  double sx = 0.0, sy = 0.0, sz = 0.0;
};

Expectations expectations(const QubitState& s);
/// |<ref|psi>|^2, insensitive to global phase.
double fidelity(const QubitState& ref, const QubitState& psi);

struct PropagationResult {
  QubitState final_state{};
  Expectations final_expectations;
  std::vector<std::array<double, 4>> trajectory;  // (t, sx, sy, sz)
  double fidelity = 0.0;                          // to the reference state
  std::string to_json() const;
  std::string trajectory_csv() const;
};

PropagationResult propagate(const HamiltonianTrace& trace, const QubitState& initial, const StepConfig& cfg = {},
                            const std::optional<QubitState>& reference = std::nullopt);

/// Control part of a protocol: returns (x, y, z) field coefficients at time t.
using ControlFn = std::function<void(double t, double& x, double& y, double& z)>;

/// Samples control, signal and noise on the cfg.dt grid over [0, t_f].
/// Noise sample k is used on segment k when the steps agree, otherwise the
/// sample covering the segment's sampling time is taken.
HamiltonianTrace assemble_trace(double t_f, const StepConfig& cfg, const ControlFn& control,
                                const SignalSpec* signal = nullptr, const NoiseTrace* noise = nullptr);

ControlFn control_fn(const ControlFields& fields);

/// Initial |0>, reference |0>.
PropagationResult simulate_protocol(const ControlFields& control, const SignalSpec* signal,
                                    const NoiseTrace* noise, const StepConfig& cfg = {});

struct EnsembleResult {
  Expectations mean;
  Expectations stderr_;
  std::vector<double> sz;  // per trial, index order
  std::size_t trials = 0;
};

/// Averages propagate() over noise realizations added to the z coefficient of
/// `base`. Trial i uses synthesize(model, t_f, segment dt, i); the reduction is
/// in index order, so results do not depend on `threads`.
EnsembleResult ensemble_average(const HamiltonianTrace& base, const QubitState& initial, const NoiseModel& model,
                                std::size_t trials, int threads = 1);

/// Same reduction over precomputed realizations, trial i using noise[i].
/// Sharing one bank across protocols gives paired comparisons.
EnsembleResult ensemble_average(const HamiltonianTrace& base, const QubitState& initial,
                                const std::vector<NoiseTrace>& noise, int threads = 1);
/// Noise bank: synthesize(model, t_f, dt, i) for i in [0, trials).
std::vector<NoiseTrace> noise_bank(const NoiseModel& model, double t_f, double dt, std::size_t trials, int threads = 1);
/// Convenience: QIF control with optional signal.
EnsembleResult ensemble_average(const ControlFields& control, const SignalSpec* signal, const NoiseModel& model,
                                std::size_t trials, const StepConfig& cfg = {}, int threads = 1);

}  // namespace qif
