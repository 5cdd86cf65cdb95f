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

#include "qif/noise.hpp"

#include <fftw3.h>

#include <cmath>
#include <json.hpp>
#include <map>
#include <memory>
#include <mutex>
#include <random>

#include "qif/error.hpp"
#include "qif/util.hpp"

namespace qif {

const char* to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::one_over_f: return "one_over_f";
    case NoiseKind::ornstein_uhlenbeck: return "ornstein_uhlenbeck";
    case NoiseKind::white: return "white";
  }
  return "?";
}

NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "one_over_f" || s == "1/f") return NoiseKind::one_over_f;
  if (s == "ornstein_uhlenbeck" || s == "ou") return NoiseKind::ornstein_uhlenbeck;
  if (s == "white") return NoiseKind::white;
  throw InvalidInput("noise.kind: unknown value '" + s + "'");
}

void NoiseModel::validate() const {
  if (!(rms_amplitude >= 0.0) || !std::isfinite(rms_amplitude)) throw InvalidInput("noise.rms_amplitude must be >= 0");
  if (kind == NoiseKind::one_over_f) {
    if (!(f_low > 0.0)) throw InvalidInput("noise.f_low must be positive for 1/f noise");
    if (!(f_high > f_low)) throw InvalidInput("noise.f_high must exceed noise.f_low");
    if (!std::isfinite(exponent)) throw InvalidInput("noise.exponent must be finite");
  }
  if (kind == NoiseKind::ornstein_uhlenbeck && !(correlation_time > 0.0))
    throw InvalidInput("noise.correlation_time must be positive");
}

NoiseModel NoiseModel::from_json(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("noise model is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInput("noise model must be a JSON object");
  NoiseModel m;
  try {
    if (j.contains("kind")) m.kind = noise_kind_from_string(j["kind"].get<std::string>());
    m.rms_amplitude = j.value("rms_amplitude", m.rms_amplitude);
    m.exponent = j.value("exponent", m.exponent);
    m.f_low = j.value("f_low", m.f_low);
    m.f_high = j.value("f_high", m.f_high);
    m.correlation_time = j.value("correlation_time", m.correlation_time);
    m.seed = j.value("seed", m.seed);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("noise: wrong field type: ") + e.what());
  }
  m.validate();
  return m;
}

std::string NoiseModel::to_json() const {
  nlohmann::json j = {{"kind", to_string(kind)},
                      {"rms_amplitude", rms_amplitude},
                      {"exponent", exponent},
                      {"f_low", f_low},
                      {"f_high", f_high},
                      {"correlation_time", correlation_time},
                      {"seed", seed}};
  return j.dump();
}

std::string NoiseTrace::to_csv() const {
  std::string out = "t_us,noise_rad_per_us\n";
  for (std::size_t k = 0; k < values.size(); ++k)
    out += format_number(dt * static_cast<double>(k)) + ',' + format_number(values[k], 17) + '\n';
  return out;
}

namespace {

// FFTW planning is not thread-safe; plans are created once per size under a
// lock and then executed on caller-owned, fftw_malloc'd buffers.
std::mutex g_plan_mutex;

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : p(fftw_malloc(bytes)) {
    if (!p) throw NumericalFailure("FFT buffer allocation failed");
  }
  ~FftwBuffer() { fftw_free(p); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* p;
};

fftw_plan c2r_plan(int n) {
  static std::map<int, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  FftwBuffer in(sizeof(fftw_complex) * static_cast<std::size_t>(n / 2 + 1));
  FftwBuffer out(sizeof(double) * static_cast<std::size_t>(n));
  fftw_plan p = fftw_plan_dft_c2r_1d(n, static_cast<fftw_complex*>(in.p), static_cast<double*>(out.p), FFTW_ESTIMATE);
  if (!p) throw NumericalFailure("FFTW planning failed");
  cache.emplace(n, p);
  return p;
}

fftw_plan r2c_plan(int n) {
  static std::map<int, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  FftwBuffer in(sizeof(double) * static_cast<std::size_t>(n));
  FftwBuffer out(sizeof(fftw_complex) * static_cast<std::size_t>(n / 2 + 1));
  fftw_plan p = fftw_plan_dft_r2c_1d(n, static_cast<double*>(in.p), static_cast<fftw_complex*>(out.p), FFTW_ESTIMATE);
  if (!p) throw NumericalFailure("FFTW planning failed");
  cache.emplace(n, p);
  return p;
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(trial + 0x51ed270b27a3c5f1ull)));
}

std::vector<double> one_over_f(const NoiseModel& m, std::size_t n, double dt, std::mt19937_64& rng) {
  // Pad so the lowest band frequency is resolved by at least two bins.
  const std::size_t min_len = static_cast<std::size_t>(std::ceil(2.0 / (m.f_low * dt)));
  std::size_t L = std::max(n, min_len);
  if (L % 2) ++L;
  const std::size_t bins = L / 2 + 1;
  const double df = 1.0 / (static_cast<double>(L) * dt);

  FftwBuffer spec(sizeof(fftw_complex) * bins);
  FftwBuffer out(sizeof(double) * L);
  auto* X = static_cast<fftw_complex*>(spec.p);
  auto* x = static_cast<double*>(out.p);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  for (std::size_t k = 0; k < bins; ++k) {
    const double f = df * static_cast<double>(k);
    const double ph = phase(rng);  // drawn for every bin so streams do not depend on the band
    double a = 0.0;
    if (k > 0 && f >= m.f_low && f <= m.f_high) a = std::pow(f, -0.5 * m.exponent);
    if (k + 1 == bins) {
      X[k][0] = a * std::cos(ph);  // Nyquist bin must be real
      X[k][1] = 0.0;
    } else {
      X[k][0] = a * std::cos(ph);
      X[k][1] = a * std::sin(ph);
    }
  }
  fftw_execute_dft_c2r(c2r_plan(static_cast<int>(L)), X, x);
  double ss = 0.0;
  for (std::size_t i = 0; i < L; ++i) ss += x[i] * x[i];
  const double unit_rms = std::sqrt(ss / static_cast<double>(L));
  if (!(unit_rms > 0.0)) throw InvalidInput("noise band contains no frequency bins; widen f_low..f_high");
  std::vector<double> v(x, x + n);
  const double scale = m.rms_amplitude / unit_rms;
  for (double& e : v) e *= scale;
  return v;
}

}  // namespace

NoiseTrace synthesize(const NoiseModel& model, double duration_us, double dt_us, std::uint64_t trial) {
  model.validate();
  if (!(dt_us > 0.0) || !(duration_us > 0.0)) throw InvalidInput("noise synthesis needs positive duration and dt");
  if (model.kind == NoiseKind::one_over_f && 2.0 * dt_us > 1.0 / model.f_high * (1.0 + 1e-12))
    throw InvalidInput("noise.f_high exceeds the Nyquist frequency of the sampling step");
  const auto n = static_cast<std::size_t>(std::llround(duration_us / dt_us));
  if (n == 0) throw InvalidInput("noise trace would be empty");
  NoiseTrace tr;
  tr.dt = dt_us;
  if (model.rms_amplitude == 0.0) {
    tr.values.assign(n, 0.0);
    return tr;
  }
  auto rng = trial_rng(model.seed, trial);
  switch (model.kind) {
    case NoiseKind::one_over_f:
      tr.values = one_over_f(model, n, dt_us, rng);
      break;
    case NoiseKind::white: {
      std::normal_distribution<double> g(0.0, 1.0);
      tr.values.resize(n);
      for (double& v : tr.values) v = model.rms_amplitude * g(rng);
      break;
    }
    case NoiseKind::ornstein_uhlenbeck: {
      std::normal_distribution<double> g(0.0, 1.0);
      const double decay = std::exp(-dt_us / model.correlation_time);
      const double kick = std::sqrt(1.0 - decay * decay);
      tr.values.resize(n);
      double x = g(rng);
      for (std::size_t k = 0; k < n; ++k) {
        tr.values[k] = model.rms_amplitude * x;
        x = decay * x + kick * g(rng);
      }
      break;
    }
  }
  return tr;
}

Spectrum psd_estimate(const std::vector<NoiseTrace>& traces) {
  if (traces.size() < 10) throw InvalidInput("psd_estimate needs at least 10 traces");
  const std::size_t n = traces.front().values.size();
  const double dt = traces.front().dt;
  if (n < 8) throw InvalidInput("psd_estimate: traces too short");
  for (const auto& t : traces)
    if (t.values.size() != n || t.dt != dt) throw InvalidInput("psd_estimate: traces differ in length or step");

  std::vector<double> w(n);
  double w2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n));
    w2 += w[i] * w[i];
  }
  const std::size_t bins = n / 2 + 1;
  Spectrum s;
  s.frequencies.resize(bins);
  s.psd.assign(bins, 0.0);
  for (std::size_t k = 0; k < bins; ++k) s.frequencies[k] = static_cast<double>(k) / (static_cast<double>(n) * dt);

  FftwBuffer in(sizeof(double) * n);
  FftwBuffer out(sizeof(fftw_complex) * bins);
  auto* x = static_cast<double*>(in.p);
  auto* X = static_cast<fftw_complex*>(out.p);
  const fftw_plan plan = r2c_plan(static_cast<int>(n));
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < n; ++i) x[i] = t.values[i] * w[i];
    fftw_execute_dft_r2c(plan, x, X);
    for (std::size_t k = 0; k < bins; ++k) {
      const bool edge = (k == 0) || (n % 2 == 0 && k + 1 == bins);
      s.psd[k] += (edge ? 1.0 : 2.0) * (X[k][0] * X[k][0] + X[k][1] * X[k][1]) * dt / w2;
    }
  }
  for (double& p : s.psd) p /= static_cast<double>(traces.size());
  return s;
}

double loglog_slope(const Spectrum& s, double f_min, double f_max) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t k = 0; k < s.frequencies.size(); ++k) {
    const double f = s.frequencies[k];
    if (f < f_min || f > f_max || f <= 0.0 || !(s.psd[k] > 0.0)) continue;
    const double X = std::log10(f), Y = std::log10(s.psd[k]);
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
    ++m;
  }
  if (m < 2) throw InvalidInput("loglog_slope: fewer than two bins in range");
  const double den = static_cast<double>(m) * sxx - sx * sx;
  return (static_cast<double>(m) * sxy - sx * sy) / den;
}

}  // namespace qif
