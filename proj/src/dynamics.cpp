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

#include "qif/dynamics.hpp"

#include <cmath>
#include <json.hpp>

#include "qif/error.hpp"
#include "qif/util.hpp"

namespace qif {

using cd = std::complex<double>;

QubitState basis0() { return {cd(1.0, 0.0), cd(0.0, 0.0)}; }
QubitState basis1() { return {cd(0.0, 0.0), cd(1.0, 0.0)}; }
QubitState plus_x() {
  const double r = 1.0 / std::sqrt(2.0);
  return {cd(r, 0.0), cd(r, 0.0)};
}

Expectations expectations(const QubitState& s) {
  const cd c = std::conj(s[0]) * s[1];
  return {2.0 * c.real(), 2.0 * c.imag(), std::norm(s[0]) - std::norm(s[1])};
}

double fidelity(const QubitState& ref, const QubitState& psi) {
  return std::norm(std::conj(ref[0]) * psi[0] + std::conj(ref[1]) * psi[1]);
}

void HamiltonianTrace::validate() const {
  const std::size_t n = x.size();
  if (n == 0) throw InvalidInput("Hamiltonian trace has no segments");
  if (y.size() != n || z.size() != n || grid.size() != n + 1)
    throw InvalidInput("Hamiltonian trace arrays have inconsistent sizes");
  const double step = (grid.back() - grid.front()) / static_cast<double>(n);
  if (!(step > 0.0)) throw InvalidInput("Hamiltonian trace grid must be increasing");
  for (std::size_t k = 0; k < n; ++k) {
    const double d = grid[k + 1] - grid[k];
    if (std::abs(d - step) > 1e-9 * step + 1e-12) throw InvalidInput("Hamiltonian trace grid is not uniform");
    if (!std::isfinite(x[k]) || !std::isfinite(y[k]) || !std::isfinite(z[k]))
      throw NumericalFailure("Hamiltonian trace contains non-finite coefficients");
  }
  for (const auto& kk : kicks) {
    if (kk.before_segment > n) throw InvalidInput("kick index beyond the trace");
    const double nn = std::sqrt(kk.nx * kk.nx + kk.ny * kk.ny + kk.nz * kk.nz);
    if (!(nn > 0.0) || !std::isfinite(kk.angle)) throw InvalidInput("kick needs a nonzero axis and finite angle");
  }
}

namespace {

// psi <- exp(-i theta (n . sigma)) psi for unit n.
inline void rotate(QubitState& s, double nx, double ny, double nz, double theta) {
  const double c = std::cos(theta), sn = std::sin(theta);
  const cd a = s[0], b = s[1];
  const cd mis(0.0, -sn);
  s[0] = c * a + mis * (nz * a + cd(nx, -ny) * b);
  s[1] = c * b + mis * (cd(nx, ny) * a - nz * b);
}

inline void step(QubitState& s, double x, double y, double z, double dt) {
  const double mag = std::sqrt(x * x + y * y + z * z);
  if (mag == 0.0) return;
  rotate(s, x / mag, y / mag, z / mag, 0.5 * mag * dt);
}

void apply_kick(QubitState& s, const Kick& k) {
  const double nn = std::sqrt(k.nx * k.nx + k.ny * k.ny + k.nz * k.nz);
  rotate(s, k.nx / nn, k.ny / nn, k.nz / nn, 0.5 * k.angle);
}

}  // namespace

PropagationResult propagate(const HamiltonianTrace& trace, const QubitState& initial, const StepConfig& cfg,
                            const std::optional<QubitState>& reference) {
  trace.validate();
  const double n0 = std::norm(initial[0]) + std::norm(initial[1]);
  if (std::abs(n0 - 1.0) > 1e-10) throw InvalidInput("initial state is not normalized");
  if (!(cfg.dt > 0.0)) throw InvalidInput("step dt must be positive");
  const std::size_t n = trace.segments();
  const double seg = trace.duration() / static_cast<double>(n);
  // Segments are piecewise constant; a finer cfg.dt only subdivides them.
  const auto sub = static_cast<std::size_t>(std::max(1.0, std::ceil(seg / cfg.dt - 1e-9)));
  const double h = seg / static_cast<double>(sub);

  std::vector<std::vector<const Kick*>> kicks_at;
  if (!trace.kicks.empty()) {
    kicks_at.resize(n + 1);
    for (const auto& k : trace.kicks) kicks_at[k.before_segment].push_back(&k);
  }

  PropagationResult r;
  QubitState s = initial;
  auto record = [&](double t) {
    if (!cfg.trajectory_store) return;
    const auto e = expectations(s);
    r.trajectory.push_back({t, e.sx, e.sy, e.sz});
  };
  record(trace.grid.front());
  for (std::size_t k = 0; k < n; ++k) {
    if (!kicks_at.empty())
      for (const Kick* kk : kicks_at[k]) apply_kick(s, *kk);
    for (std::size_t j = 0; j < sub; ++j) step(s, trace.x[k], trace.y[k], trace.z[k], h);
    record(trace.grid[k + 1]);
  }
  if (!kicks_at.empty())
    for (const Kick* kk : kicks_at[n]) apply_kick(s, *kk);

  r.final_state = s;
  r.final_expectations = expectations(s);
  r.fidelity = fidelity(reference.value_or(initial), s);
  return r;
}

std::string PropagationResult::to_json() const {
  nlohmann::json j;
  j["final_state"] = {{"c0_re", final_state[0].real()},
                      {"c0_im", final_state[0].imag()},
                      {"c1_re", final_state[1].real()},
                      {"c1_im", final_state[1].imag()}};
  j["sx"] = final_expectations.sx;
  j["sy"] = final_expectations.sy;
  j["sz"] = final_expectations.sz;
  j["fidelity"] = fidelity;
  return j.dump(2);
}

std::string PropagationResult::trajectory_csv() const {
  std::string out = "t_us,sx,sy,sz\n";
  for (const auto& row : trajectory)
    out += format_number(row[0]) + ',' + format_number(row[1]) + ',' + format_number(row[2]) + ',' +
           format_number(row[3]) + '\n';
  return out;
}

HamiltonianTrace assemble_trace(double t_f, const StepConfig& cfg, const ControlFn& control, const SignalSpec* signal,
                                const NoiseTrace* noise) {
  if (!(t_f > 0.0)) throw InvalidInput("protocol duration must be positive");
  if (!(cfg.dt > 0.0)) throw InvalidInput("step dt must be positive");
  const auto n = static_cast<std::size_t>(std::max<long long>(1, std::llround(t_f / cfg.dt)));
  const double h = t_f / static_cast<double>(n);
  if (signal) signal->validate();
  if (noise) {
    if (noise->values.empty() || !(noise->dt > 0.0)) throw InvalidInput("noise trace is empty");
    if (noise->duration() < t_f * (1.0 - 1e-9)) throw InvalidInput("noise trace shorter than the protocol");
  }
  const bool same_grid = noise && std::abs(noise->dt - h) <= 1e-12 * h;

  HamiltonianTrace tr;
  tr.grid.resize(n + 1);
  tr.x.resize(n);
  tr.y.resize(n);
  tr.z.resize(n);
  for (std::size_t k = 0; k <= n; ++k) tr.grid[k] = h * static_cast<double>(k);
  tr.grid[n] = t_f;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = h * (static_cast<double>(k) + (cfg.sampling == Sampling::midpoint ? 0.5 : 0.0));
    double x = 0.0, y = 0.0, z = 0.0;
    if (control) control(t, x, y, z);
    if (signal && signal->amplitude != 0.0) z += signal->amplitude * signal->shape(t, t_f);
    if (noise) {
      std::size_t idx = k;
      if (!same_grid) idx = std::min(noise->values.size() - 1, static_cast<std::size_t>(t / noise->dt));
      z += noise->values[idx];
    }
    tr.x[k] = x;
    tr.y[k] = y;
    tr.z[k] = z;
  }
  return tr;
}

ControlFn control_fn(const ControlFields& fields) {
  return [&fields](double t, double& x, double& y, double& z) {
    double eps, del;
    fields.at(t, eps, del);
    x = -eps;
    y = 0.0;
    z = del;
  };
}

PropagationResult simulate_protocol(const ControlFields& control, const SignalSpec* signal, const NoiseTrace* noise,
                                    const StepConfig& cfg) {
  const double tf = control.duration();
  if (!(tf > 0.0)) throw InvalidInput("control fields have zero duration");
  HamiltonianTrace tr = assemble_trace(tf, cfg, control_fn(control), signal, noise);
  return propagate(tr, basis0(), cfg, basis0());
}

namespace {

EnsembleResult reduce(const std::vector<Expectations>& res) {
  const std::size_t trials = res.size();
  EnsembleResult out;
  out.trials = trials;
  out.sz.resize(trials);
  double m[3] = {0, 0, 0}, q[3] = {0, 0, 0};
  for (std::size_t i = 0; i < trials; ++i) {
    const double v[3] = {res[i].sx, res[i].sy, res[i].sz};
    for (int c = 0; c < 3; ++c) {
      m[c] += v[c];
      q[c] += v[c] * v[c];
    }
    out.sz[i] = res[i].sz;
  }
  const double T = static_cast<double>(trials);
  double se[3];
  for (int c = 0; c < 3; ++c) {
    m[c] /= T;
    const double var = trials > 1 ? std::max(0.0, (q[c] - T * m[c] * m[c]) / (T - 1.0)) : 0.0;
    se[c] = std::sqrt(var / T);
  }
  out.mean = {m[0], m[1], m[2]};
  out.stderr_ = {se[0], se[1], se[2]};
  return out;
}

Expectations run_with_noise(const HamiltonianTrace& base, const QubitState& initial, const NoiseTrace* nt) {
  const std::size_t n = base.segments();
  StepConfig cfg;
  cfg.dt = base.duration() / static_cast<double>(n);
  if (!nt) return propagate(base, initial, cfg).final_expectations;
  HamiltonianTrace tr = base;
  for (std::size_t k = 0; k < n; ++k) tr.z[k] += nt->values[k];
  return propagate(tr, initial, cfg).final_expectations;
}

}  // namespace

EnsembleResult ensemble_average(const HamiltonianTrace& base, const QubitState& initial, const NoiseModel& model,
                                std::size_t trials, int threads) {
  if (trials < 1) throw InvalidInput("ensemble needs at least one trial");
  base.validate();
  model.validate();
  const double h = base.duration() / static_cast<double>(base.segments());
  std::vector<Expectations> res(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    if (model.rms_amplitude == 0.0) {
      res[i] = run_with_noise(base, initial, nullptr);
      return;
    }
    const NoiseTrace nt = synthesize(model, base.duration(), h, i);
    res[i] = run_with_noise(base, initial, &nt);
  });
  return reduce(res);
}

EnsembleResult ensemble_average(const HamiltonianTrace& base, const QubitState& initial,
                                const std::vector<NoiseTrace>& noise, int threads) {
  if (noise.empty()) throw InvalidInput("ensemble needs at least one trial");
  base.validate();
  const std::size_t n = base.segments();
  const double h = base.duration() / static_cast<double>(n);
  for (const auto& nt : noise)
    if (nt.values.size() != n || std::abs(nt.dt - h) > 1e-12 * h)
      throw InvalidInput("precomputed noise does not match the trace grid");
  std::vector<Expectations> res(noise.size());
  parallel_for(noise.size(), threads, [&](std::size_t i) { res[i] = run_with_noise(base, initial, &noise[i]); });
  return reduce(res);
}

EnsembleResult ensemble_average(const ControlFields& control, const SignalSpec* signal, const NoiseModel& model,
                                std::size_t trials, const StepConfig& cfg, int threads) {
  HamiltonianTrace base = assemble_trace(control.duration(), cfg, control_fn(control), signal, nullptr);
  return ensemble_average(base, basis0(), model, trials, threads);
}

std::vector<NoiseTrace> noise_bank(const NoiseModel& model, double t_f, double dt, std::size_t trials, int threads) {
  std::vector<NoiseTrace> bank(trials);
  parallel_for(trials, threads, [&](std::size_t i) { bank[i] = synthesize(model, t_f, dt, i); });
  return bank;
}

}  // namespace qif
