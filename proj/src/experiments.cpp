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

#include "qif/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <json.hpp>
#include <set>

#include "config_json.hpp"
#include "qif/error.hpp"
#include "qif/util.hpp"

#ifndef QIF_VERSION_STRING
#define QIF_VERSION_STRING "dev"
#endif

namespace qif {

using nlohmann::json;

namespace {

struct ExperimentName {
  Experiment e;
  const char* name;
};

constexpr ExperimentName kExperiments[] = {
    {Experiment::freq_response, "freq_response"},
    {Experiment::phase_sweep, "phase_sweep"},
    {Experiment::amplitude_sweep, "amplitude_sweep"},
    {Experiment::filter_center_map, "filter_center_map"},
    {Experiment::cpmg_map, "cpmg_map"},
    {Experiment::amplitude_robustness, "amplitude_robustness"},
    {Experiment::duration_decay, "duration_decay"},
    {Experiment::dual_band, "dual_band"},
};

}  // namespace

const char* to_string(Experiment e) {
  for (const auto& x : kExperiments)
    if (x.e == e) return x.name;
  return "unknown";
}

Experiment experiment_from_string(const std::string& s) {
  for (const auto& x : kExperiments)
    if (s == x.name) return x.e;
  throw InvalidInput("experiment: unknown experiment '" + s + "'");
}

void ReadoutModel::validate() const {
  if (!enabled) return;
  if (!std::isfinite(bright) || !std::isfinite(dark)) throw InvalidInput("readout levels must be finite");
  if (!(bright > dark)) throw InvalidInput("readout.bright must exceed readout.dark");
  if (bright + dark == 0.0) throw InvalidInput("readout: bright + dark = 0 makes the average reference vanish");
}

double ReadoutModel::contrast(double sz) const {
  if (!enabled) return sz;
  const double s1 = dark + (bright - dark) * 0.5 * (1.0 + sz);
  const double s2 = dark + (bright - dark) * 0.5 * (1.0 - sz);
  return (s1 - s2) / (0.5 * (s1 + s2));
}

FilterSpec default_filter() {
  FilterSpec f;
  f.kind = FilterKind::bandpass;
  f.centers = {Center{1.35, 0.0, 1.0}};
  return f;
}

int parse_protocol(const std::string& name) {
  if (name == "qif") return -1;
  if (name == "free") return 0;
  if (name.rfind("cpmg-", 0) == 0) {
    const std::string tail = name.substr(5);
    if (!tail.empty() && tail.size() < 6 && std::all_of(tail.begin(), tail.end(), ::isdigit)) {
      const int n = std::stoi(tail);
      if (n >= 1) return n;
    }
  }
  throw InvalidInput("sweep.protocols: unknown protocol '" + name + "' (qif, free or cpmg-<n>)");
}

namespace {

void require_all(const std::vector<double>& v, const std::string& field, const std::function<bool(double)>& ok,
                 const std::string& what) {
  for (double x : v)
    if (!ok(x)) throw InvalidInput(field + " entries must be " + what);
}

std::vector<double> default_freq() { return linspace_step(0.0, 4.0, 0.01); }

double first_center(const FilterSpec& f) { return f.centers.empty() ? 0.0 : f.centers.front().f0_mhz; }

}  // namespace

SweepConfig SweepConfig::from_json(const std::string& text, std::optional<std::uint64_t> seed_override,
                                   std::optional<std::string> experiment_override) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  static const std::set<std::string> known = {"experiment", "seed",   "filter", "mode",    "signal", "sweep",
                                              "noise",      "trials", "step",   "cpmg",    "readout", "decay",
                                              "waveform",   "output", "comment"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw InvalidInput("config: unknown field '" + it.key() + "'");

  SweepConfig c;
  try {
    if (experiment_override) {
      if (j.contains("experiment") && j["experiment"].get<std::string>() != *experiment_override)
        throw InvalidInput("experiment: config names '" + j["experiment"].get<std::string>() +
                           "' but the command asked for '" + *experiment_override + "'");
      c.experiment = experiment_from_string(*experiment_override);
    } else if (j.contains("experiment")) {
      c.experiment = experiment_from_string(j["experiment"].get<std::string>());
    } else {
      throw InvalidInput("experiment: missing");
    }
    if (seed_override) {
      c.seed = *seed_override;
    } else if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned()) throw InvalidInput("seed must be a non-negative integer");
      c.seed = j["seed"].get<std::uint64_t>();
    } else {
      throw InvalidInput("seed: missing (seeds are mandatory)");
    }
  } catch (const json::exception&) {
    throw InvalidInput("experiment/seed: wrong type");
  }
  j["experiment"] = to_string(c.experiment);
  j["seed"] = c.seed;

  const Experiment ex = c.experiment;
  if (j.contains("filter")) {
    c.filter = FilterSpec::from_json(j["filter"].dump());
  } else if (ex == Experiment::dual_band) {
    c.filter.kind = FilterKind::multiband;
    c.filter.centers = {Center{1.5, 0.0, 1.0}, Center{2.5, 0.0, 1.0}};
  } else {
    c.filter = default_filter();
  }
  if (c.filter.kind == FilterKind::lowpass &&
      (ex == Experiment::phase_sweep || ex == Experiment::filter_center_map))
    throw InvalidInput("filter.kind: " + std::string(to_string(ex)) + " needs a bandpass filter");

  try {
    if (j.contains("mode")) c.mode = aux_mode_from_string(j["mode"].get<std::string>());

    if (ex == Experiment::phase_sweep) c.probe = Waveform::sine;
    if (j.contains("signal")) {
      const json& s = j["signal"];
      if (!s.is_object()) throw InvalidInput("signal must be an object");
      if (s.contains("waveform")) {
        c.probe = waveform_from_string(s["waveform"].get<std::string>());
        if (c.probe == Waveform::samples) throw InvalidInput("signal.waveform: sweeps need cosine or sine");
      }
      c.amplitude = s.value("amplitude", c.amplitude);
      c.probe_phase = s.value("phase_rad", c.probe_phase);
      if (s.contains("frequency_mhz")) c.probe_frequency = s["frequency_mhz"].get<double>();
    }
    if (!(c.amplitude >= 0.0) || !std::isfinite(c.amplitude)) throw InvalidInput("signal.amplitude must be >= 0");
    if (!std::isfinite(c.probe_phase)) throw InvalidInput("signal.phase_rad must be finite");
    if (c.probe_frequency && !(*c.probe_frequency >= 0.0)) throw InvalidInput("signal.frequency_mhz must be >= 0");

    const json sw = j.contains("sweep") ? j["sweep"] : json::object();
    if (!sw.is_object()) throw InvalidInput("sweep must be an object");
    static const std::set<std::string> axes = {"freq_mhz", "phase_rad", "amplitude", "center_mhz",
                                               "scale",    "duration_us", "n_pulses", "protocols"};
    for (auto it = sw.begin(); it != sw.end(); ++it)
      if (!axes.count(it.key())) throw InvalidInput("sweep: unknown axis '" + it.key() + "'");
    auto axis = [&](const char* key, std::vector<double> fallback) {
      return sw.contains(key) ? parse_axis(sw[key], std::string("sweep.") + key) : fallback;
    };

    switch (ex) {
      case Experiment::freq_response:
      case Experiment::dual_band:
        c.freq_mhz = axis("freq_mhz", default_freq());
        break;
      case Experiment::phase_sweep: {
        std::vector<double> ph(24);
        for (int i = 0; i < 24; ++i) ph[i] = kTwoPi * i / 24.0;
        c.phase_rad = axis("phase_rad", ph);
        break;
      }
      case Experiment::amplitude_sweep:
        c.amplitudes = axis("amplitude", linspace_step(0.0, 3.0, 0.05));
        require_all(c.amplitudes, "sweep.amplitude", [](double x) { return x >= 0.0; }, ">= 0");
        break;
      case Experiment::filter_center_map: {
        std::vector<double> ctr(10);
        for (int i = 0; i < 10; ++i) ctr[i] = 0.5 + 2.5 * i / 9.0;
        c.center_mhz = axis("center_mhz", ctr);
        require_all(c.center_mhz, "sweep.center_mhz", [](double x) { return x >= 0.0; }, ">= 0");
        c.freq_mhz = axis("freq_mhz", default_freq());
        break;
      }
      case Experiment::cpmg_map: {
        c.n_pulses = {1, 2, 4, 8, 16};
        if (sw.contains("n_pulses")) {
          c.n_pulses.clear();
          for (double v : parse_axis(sw["n_pulses"], "sweep.n_pulses")) {
            if (v < 1.0 || v != std::floor(v) || v > 100000.0)
              throw InvalidInput("sweep.n_pulses entries must be positive integers");
            c.n_pulses.push_back(static_cast<int>(v));
          }
        }
        c.freq_mhz = axis("freq_mhz", default_freq());
        break;
      }
      case Experiment::amplitude_robustness:
        c.scales = axis("scale", linspace_step(0.5, 1.5, 0.05));
        require_all(c.scales, "sweep.scale", [](double x) { return x > 0.0; }, "positive");
        c.protocols = {"qif", "cpmg-32"};
        c.pulse_width = 0.02;
        break;
      case Experiment::duration_decay:
        c.duration_us = axis("duration_us", {4.0, 8.0, 16.0, 32.0, 64.0});
        require_all(c.duration_us, "sweep.duration_us", [](double x) { return x > 0.0; }, "positive");
        c.protocols = {"qif", "cpmg-8", "cpmg-16", "free"};
        break;
    }
    if (sw.contains("protocols")) {
      if (ex != Experiment::amplitude_robustness && ex != Experiment::duration_decay)
        throw InvalidInput("sweep.protocols: only used by amplitude_robustness and duration_decay");
      if (!sw["protocols"].is_array() || sw["protocols"].empty())
        throw InvalidInput("sweep.protocols must be a non-empty array of names");
      c.protocols.clear();
      for (const auto& p : sw["protocols"]) {
        c.protocols.push_back(p.get<std::string>());
        parse_protocol(c.protocols.back());
      }
    }
    for (double f : c.freq_mhz)
      if (f < 0.0) throw InvalidInput("sweep.freq_mhz entries must be >= 0");

    if (j.contains("noise")) {
      json n = j["noise"];
      if (!n.is_object()) throw InvalidInput("noise must be an object");
      if (n.contains("seed")) throw InvalidInput("noise.seed: use the top-level seed");
      if (!n.contains("rms_amplitude")) n["rms_amplitude"] = 0.5;
      NoiseModel m = NoiseModel::from_json(n.dump());
      m.seed = c.seed;
      c.noise = m;
      j["noise"] = n;
    }
    if (j.contains("trials")) {
      if (!j["trials"].is_number_integer() || j["trials"].get<long long>() < 1)
        throw InvalidInput("trials must be a positive integer");
      c.trials = j["trials"].get<std::size_t>();
    } else if (c.noisy()) {
      c.trials = ex == Experiment::duration_decay ? 200 : ex == Experiment::amplitude_robustness ? 100 : 50;
    }

    if (j.contains("step")) {
      c.step = parse_step(j["step"]);
      c.quadrature_refine = j["step"].value("quadrature_refine", c.quadrature_refine);
    }
    if (!(c.step.dt > 0.0) || c.step.dt > 0.1) throw InvalidInput("step.dt_us must lie in (0, 0.1]");
    if (c.quadrature_refine < 1 || c.quadrature_refine > 64)
      throw InvalidInput("step.quadrature_refine must lie in [1, 64]");

    if (j.contains("cpmg")) {
      const json& s = j["cpmg"];
      if (!s.is_object()) throw InvalidInput("cpmg must be an object");
      c.pulse_width = s.value("pulse_width_us", c.pulse_width);
      if (s.contains("axis")) {
        const std::string a = s["axis"].get<std::string>();
        if (a == "x")
          c.axis = PulseAxis::x;
        else if (a == "y")
          c.axis = PulseAxis::y;
        else
          throw InvalidInput("cpmg.axis must be x or y");
      }
    }
    if (!(c.pulse_width >= 0.0)) throw InvalidInput("cpmg.pulse_width_us must be >= 0");

    if (j.contains("readout")) {
      const json& s = j["readout"];
      if (!s.is_object()) throw InvalidInput("readout must be an object");
      c.readout.enabled = s.value("enabled", false);
      c.readout.bright = s.value("bright", c.readout.bright);
      c.readout.dark = s.value("dark", c.readout.dark);
      c.readout.validate();
    }

    if (j.contains("decay")) {
      const json& s = j["decay"];
      if (!s.is_object()) throw InvalidInput("decay must be an object");
      const std::string fm = s.value("f0_mode", std::string("proportional"));
      const std::string bm = s.value("bandwidth_mode", std::string("fractional"));
      if (fm != "proportional" && fm != "fixed") throw InvalidInput("decay.f0_mode must be proportional or fixed");
      if (bm != "fractional" && bm != "absolute")
        throw InvalidInput("decay.bandwidth_mode must be fractional or absolute");
      c.decay.f0_proportional = fm == "proportional";
      c.decay.fractional_bandwidth = bm == "fractional";
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: wrong field type: ") + e.what());
  }
  c.canonical_json = j.dump();
  return c;
}

std::string SweepConfig::config_hash() const { return hex64(fnv1a64(canonical_json)); }

DecayFit fit_stretched_exponential(const std::vector<double>& t, const std::vector<double>& sz) {
  if (t.size() != sz.size() || t.size() < 2) throw InvalidInput("decay fit needs at least two points");
  double tmin = INFINITY, tmax = 0.0;
  for (double x : t) {
    if (!(x > 0.0)) throw InvalidInput("decay fit needs positive durations");
    tmin = std::min(tmin, x);
    tmax = std::max(tmax, x);
  }
  auto rss = [&](double logT, double p) {
    const double T = std::exp(logT);
    double r = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double e = sz[i] - std::exp(-std::pow(t[i] / T, p));
      r += e * e;
    }
    return r;
  };
  double lo_T = std::log(tmin * 1e-2), hi_T = std::log(tmax * 1e4);
  double lo_p = 0.5, hi_p = 4.0;
  DecayFit best{std::exp(hi_T), 1.0, INFINITY};
  double bT = hi_T, bp = 1.0;
  int nT = 401, np = 71;
  for (int pass = 0; pass < 4; ++pass) {
    const double sT = (hi_T - lo_T) / (nT - 1), sp = (hi_p - lo_p) / (np - 1);
    for (int a = 0; a < nT; ++a)
      for (int b = 0; b < np; ++b) {
        const double lt = lo_T + sT * a, p = lo_p + sp * b;
        const double r = rss(lt, p);
        if (r < best.rss) {
          best.rss = r;
          bT = lt;
          bp = p;
        }
      }
    lo_T = bT - 2 * sT;
    hi_T = bT + 2 * sT;
    lo_p = std::max(0.5, bp - 2 * sp);
    hi_p = std::min(4.0, bp + 2 * sp);
    nT = np = 21;
  }
  best.T = std::exp(bT);
  best.p = bp;
  return best;
}

namespace {

using Row = std::vector<Cell>;
using Rows = std::vector<Row>;

struct Estimate {
  double sz = 1.0;
  double se = 0.0;
};

class Builder {
 public:
  Builder(const SweepConfig& cfg, std::vector<std::string> axes) : cfg_(cfg) {
    auto cols = std::move(axes);
    for (const char* c : {"protocol", "source", "sz", "sz_stderr", "deficit", "contrast"}) cols.emplace_back(c);
    table_ = ResultTable(cols);
  }

  Row row(const std::vector<double>& axes, const std::string& protocol, const std::string& source,
          Estimate e) const {
    Row r;
    for (double a : axes) r.emplace_back(a);
    r.emplace_back(protocol);
    r.emplace_back(source);
    r.emplace_back(e.sz);
    r.emplace_back(e.se);
    r.emplace_back(1.0 - e.sz);
    r.emplace_back(cfg_.readout.contrast(e.sz));
    return r;
  }

  /// Runs tasks concurrently and appends their rows in task order.
  void run(std::size_t n, int threads, const std::function<Rows(std::size_t)>& task) {
    std::vector<Rows> out(n);
    parallel_for(n, threads, [&](std::size_t i) { out[i] = task(i); });
    for (auto& rows : out)
      for (auto& r : rows) table_.add_row(std::move(r));
  }

  ResultTable& table() { return table_; }

 private:
  const SweepConfig& cfg_;
  ResultTable table_;
};

SignalSpec probe(const SweepConfig& cfg, double f, double delta) {
  SignalSpec s = cfg.probe == Waveform::sine ? SignalSpec::sine(f, delta, cfg.probe_phase)
                                             : SignalSpec::cosine(f, delta, cfg.probe_phase);
  return s;
}

using Bank = std::optional<std::vector<NoiseTrace>>;

// Realizations shared by every point of a sweep (paired comparisons).
Bank make_bank(const SweepConfig& cfg, double tf, int threads) {
  if (!cfg.noisy()) return std::nullopt;
  const auto n = std::max<long long>(1, std::llround(tf / cfg.step.dt));
  return noise_bank(*cfg.noise, tf, tf / static_cast<double>(n), cfg.trials, threads);
}

Estimate from_ensemble(const HamiltonianTrace& base, const Bank& bank) {
  const EnsembleResult e = ensemble_average(base, basis0(), *bank, 1);
  return {e.mean.sz, e.stderr_.sz};
}

Estimate simulate_qif(const ControlFields& fields, const SignalSpec* sig, const SweepConfig& cfg, const Bank& bank) {
  if (bank) return from_ensemble(assemble_trace(fields.duration(), cfg.step, control_fn(fields), sig), bank);
  return {simulate_protocol(fields, sig, nullptr, cfg.step).final_expectations.sz, 0.0};
}

Estimate simulate_pulses(const PulseSequence& seq, const SignalSpec* sig, const SweepConfig& cfg, const Bank& bank) {
  if (bank) return from_ensemble(sequence_to_trace(seq, cfg.step.dt, TraceOptions{true}, sig, nullptr), bank);
  return {simulate_cpmg(seq, sig, nullptr, cfg.step).final_expectations.sz, 0.0};
}

// Toggling-frame phase of an ideal sequence under a cosine or sine probe.
double pulse_phase(const PulseSequence& seq, const SignalSpec& sig) {
  const TransferFunction y = cpmg_analytic_filter(seq, {sig.frequency_mhz});
  const double ph = sig.phase_rad - (sig.waveform == Waveform::sine ? kPi / 2.0 : 0.0);
  // int y cos(w t_sym + ph) dt = Re(exp(i ph) conj(Y)).
  return sig.amplitude * (std::polar(1.0, ph) * std::conj(y.values[0])).real();
}

struct QifSetup {
  ImpulseResponse kernel;
  AuxiliaryFields aux;
  ControlFields fields;
};

QifSetup qif_setup(const ImpulseResponse& h, AuxMode mode) {
  QifSetup s;
  s.kernel = h;
  s.aux = aux_from_impulse(h, mode);
  s.fields = fields_from_aux(s.aux);
  return s;
}

// Simulation plus second-order and Magnus predictions for one probe.
Rows qif_point(const Builder& b, const QifSetup& q, const SignalSpec& sig, const SweepConfig& cfg, const Bank& bank,
               const std::vector<double>& axes) {
  const std::string protocol = "qif";
  Rows rows;
  rows.push_back(b.row(axes, protocol, "simulation", simulate_qif(q.fields, &sig, cfg, bank)));
  const Quadrature quad{cfg.quadrature_refine};
  const ResponsePrediction m = magnus_predict(q.aux, sig, quad);
  rows.push_back(b.row(axes, protocol, "prediction", {m.second_order_sz, 0.0}));
  rows.push_back(b.row(axes, protocol, "magnus", {m.magnus_sz, 0.0}));
  return rows;
}

void common_meta(ResultTable& t, const SweepConfig& cfg) {
  t.set_meta("experiment", to_string(cfg.experiment));
  t.set_meta("seed", std::to_string(cfg.seed));
  t.set_meta("config_hash", cfg.config_hash());
  t.set_meta("version", QIF_VERSION_STRING);
}

ResultTable freq_response(const SweepConfig& cfg, int threads) {
  Builder b(cfg, {"freq_mhz"});
  const QifSetup q = qif_setup(design_filter(cfg.filter), cfg.mode);
  const Bank bank = make_bank(cfg, q.fields.duration(), threads);
  b.run(cfg.freq_mhz.size(), threads, [&](std::size_t i) {
    const double f = cfg.freq_mhz[i];
    return qif_point(b, q, probe(cfg, f, cfg.amplitude), cfg, bank, {f});
  });
  auto& t = b.table();
  t.set_meta("plot.kind", "line");
  t.set_meta("plot.x", "freq_mhz");
  t.set_meta("plot.y", "deficit");
  if (q.kernel.overlap_warning()) t.set_meta("warning", "multiband passbands overlap");
  return t;
}

ResultTable phase_sweep(const SweepConfig& cfg, int threads) {
  Builder b(cfg, {"phase_rad"});
  const double f0 = first_center(cfg.filter);
  FilterSpec lp = cfg.filter;
  lp.kind = FilterKind::lowpass;
  lp.centers.clear();
  const ImpulseResponse envelope = normalize_kernel(design_lowpass(lp), cfg.filter.normalize_peak);
  const double fp = cfg.probe_frequency.value_or(f0);
  const SignalSpec sig = probe(cfg, fp, cfg.amplitude);
  const bool law = sig.waveform == Waveform::sine && sig.phase_rad == 0.0 && fp == f0;
  PhaseLawResult pl;
  if (law) pl = phase_law(envelope, f0, cfg.phase_rad, sig);
  const Bank bank = make_bank(cfg, envelope.duration(), threads);
  b.run(cfg.phase_rad.size(), threads, [&](std::size_t i) {
    const double phi = cfg.phase_rad[i];
    const QifSetup q = qif_setup(modulate_bandpass(envelope, f0, phi), cfg.mode);
    Rows rows = qif_point(b, q, sig, cfg, bank, {phi});
    if (law) rows.push_back(b.row({phi}, "qif", "phase_law", {1.0 - 0.5 * pl.values[i], 0.0}));
    return rows;
  });
  auto& t = b.table();
  t.set_meta("plot.kind", "line");
  t.set_meta("plot.x", "phase_rad");
  t.set_meta("plot.y", "deficit");
  if (law) {
    t.set_meta("phase_law.constant", format_number(pl.constant));
    if (pl.slow_carrier_warning) t.set_meta("warning", "carrier completes fewer than two cycles");
  }
  return t;
}

ResultTable amplitude_sweep(const SweepConfig& cfg, int threads) {
  Builder b(cfg, {"amplitude"});
  const QifSetup q = qif_setup(design_filter(cfg.filter), cfg.mode);
  const double f = cfg.probe_frequency.value_or(first_center(cfg.filter));
  const Bank bank = make_bank(cfg, q.fields.duration(), threads);
  b.run(cfg.amplitudes.size(), threads, [&](std::size_t i) {
    const double d = cfg.amplitudes[i];
    return qif_point(b, q, probe(cfg, f, d), cfg, bank, {d});
  });
  auto& t = b.table();
  t.set_meta("probe_frequency_mhz", format_number(f));
  t.set_meta("plot.kind", "line");
  t.set_meta("plot.x", "amplitude");
  t.set_meta("plot.y", "sz");
  return t;
}

ResultTable filter_center_map(const SweepConfig& cfg, int threads) {
  Builder b(cfg, {"center_mhz", "freq_mhz"});
  std::vector<QifSetup> setups(cfg.center_mhz.size());
  parallel_for(setups.size(), threads, [&](std::size_t c) {
    FilterSpec s = cfg.filter;
    s.kind = FilterKind::bandpass;
    const double phase = s.centers.empty() ? 0.0 : s.centers.front().phase_rad;
    s.centers = {Center{cfg.center_mhz[c], phase, 1.0}};
    setups[c] = qif_setup(design_filter(s), cfg.mode);
  });
  const std::size_t nf = cfg.freq_mhz.size();
  const Bank bank = make_bank(cfg, setups.front().fields.duration(), threads);
  b.run(setups.size() * nf, threads, [&](std::size_t i) {
    const std::size_t c = i / nf, k = i % nf;
    const double f = cfg.freq_mhz[k];
    const SignalSpec sig = probe(cfg, f, cfg.amplitude);
    const QifSetup& q = setups[c];
    Rows rows;
    rows.push_back(b.row({cfg.center_mhz[c], f}, "qif", "simulation", simulate_qif(q.fields, &sig, cfg, bank)));
    const double shift = second_order_deficit(q.aux, sig, Quadrature{cfg.quadrature_refine});
    rows.push_back(b.row({cfg.center_mhz[c], f}, "qif", "prediction", {1.0 + shift, 0.0}));
    return rows;
  });
  auto& t = b.table();
  t.set_meta("plot.kind", "heatmap");
  t.set_meta("plot.x", "freq_mhz");
  t.set_meta("plot.y", "center_mhz");
  t.set_meta("plot.value", "deficit");
  return t;
}

ResultTable cpmg_map(const SweepConfig& cfg, int threads) {
  Builder b(cfg, {"n_pulses", "freq_mhz"});
  const double tf = cfg.filter.duration_us;
  std::vector<PulseSequence> seqs;
  for (int n : cfg.n_pulses) seqs.push_back(build_cpmg(n, tf, cfg.pulse_width, 1.0, cfg.axis));
  const std::size_t nf = cfg.freq_mhz.size();
  const Bank bank = make_bank(cfg, tf, threads);
  b.run(seqs.size() * nf, threads, [&](std::size_t i) {
    const std::size_t s = i / nf, k = i % nf;
    const double f = cfg.freq_mhz[k];
    const SignalSpec sig = probe(cfg, f, cfg.amplitude);
    const std::string name = "cpmg-" + std::to_string(seqs[s].n_pulses);
    const std::vector<double> ax{static_cast<double>(seqs[s].n_pulses), f};
    Rows rows;
    rows.push_back(b.row(ax, name, "simulation", simulate_pulses(seqs[s], &sig, cfg, bank)));
    rows.push_back(b.row(ax, name, "prediction", {std::cos(pulse_phase(seqs[s], sig)), 0.0}));
    return rows;
  });
  auto& t = b.table();
  t.set_meta("t_f_us", format_number(tf));
  t.set_meta("plot.kind", "heatmap");
  t.set_meta("plot.x", "freq_mhz");
  t.set_meta("plot.y", "n_pulses");
  t.set_meta("plot.value", "deficit");
  return t;
}

ResultTable amplitude_robustness(const SweepConfig& cfg, int threads) {
  Builder b(cfg, {"scale"});
  const ControlFields base = qif_setup(design_filter(cfg.filter), cfg.mode).fields;
  const double tf = base.duration();
  const Bank bank = make_bank(cfg, tf, threads);
  const std::size_t np = cfg.protocols.size();
  b.run(cfg.scales.size() * np, threads, [&](std::size_t i) {
    const double s = cfg.scales[i / np];
    const std::string& name = cfg.protocols[i % np];
    const int n = parse_protocol(name);
    Estimate e;
    if (n < 0) {
      e = simulate_qif(base.scaled(s), nullptr, cfg, bank);
    } else {
      const PulseSequence seq =
          n == 0 ? build_ramsey(tf, cfg.pulse_width, s) : build_cpmg(n, tf, cfg.pulse_width, s, cfg.axis);
      e = simulate_pulses(seq, nullptr, cfg, bank);
    }
    return Rows{b.row({s}, name, "simulation", e)};
  });
  auto& t = b.table();
  t.set_meta("t_f_us", format_number(tf));
  t.set_meta("pulse_width_us", format_number(cfg.pulse_width));
  t.set_meta("plot.kind", "line");
  t.set_meta("plot.x", "scale");
  t.set_meta("plot.y", "sz");
  return t;
}

// Filter re-designed for a new total time.
FilterSpec redesign(const FilterSpec& ref, double tf, const DecayOptions& opt) {
  FilterSpec s = ref;
  s.duration_us = tf;
  s.taps = 0;
  const double k = ref.duration_us / tf;
  if (opt.f0_proportional)
    for (auto& c : s.centers) c.f0_mhz *= k;
  if (opt.fractional_bandwidth && opt.f0_proportional) s.cutoff_mhz *= k;
  return s;
}

ResultTable duration_decay(const SweepConfig& cfg, int threads) {
  Builder b(cfg, {"duration_us"});
  const std::size_t np = cfg.protocols.size();
  std::vector<std::vector<double>> curves(np);
  for (double tf : cfg.duration_us) {
    std::vector<HamiltonianTrace> base(np);
    std::vector<ControlFields> qif(np);
    for (std::size_t p = 0; p < np; ++p) {
      const int n = parse_protocol(cfg.protocols[p]);
      if (n < 0) {
        qif[p] = qif_setup(design_filter(redesign(cfg.filter, tf, cfg.decay)), cfg.mode).fields;
        base[p] = assemble_trace(tf, cfg.step, control_fn(qif[p]));
      } else {
        const PulseSequence seq =
            n == 0 ? build_ramsey(tf, cfg.pulse_width, 1.0) : build_cpmg(n, tf, cfg.pulse_width, 1.0, cfg.axis);
        base[p] = sequence_to_trace(seq, cfg.step.dt, TraceOptions{true});
      }
      base[p].validate();
    }
    const std::size_t segs = base.front().segments();
    const double h = tf / static_cast<double>(segs);
    const std::size_t trials = cfg.noisy() ? cfg.trials : 1;
    StepConfig pc;
    pc.dt = h;
    // One noise realization per trial, shared by every protocol.
    std::vector<std::vector<double>> sz(np, std::vector<double>(trials));
    parallel_for(trials, threads, [&](std::size_t i) {
      NoiseTrace nt;
      if (cfg.noisy()) nt = synthesize(*cfg.noise, tf, h, i);
      for (std::size_t p = 0; p < np; ++p) {
        HamiltonianTrace tr = base[p];
        if (cfg.noisy())
          for (std::size_t k = 0; k < segs; ++k) tr.z[k] += nt.values[k];
        sz[p][i] = propagate(tr, basis0(), pc).final_expectations.sz;
      }
    });
    for (std::size_t p = 0; p < np; ++p) {
      double m = 0.0, q = 0.0;
      for (double v : sz[p]) {
        m += v;
        q += v * v;
      }
      const double T = static_cast<double>(trials);
      m /= T;
      const double var = trials > 1 ? std::max(0.0, (q - T * m * m) / (T - 1.0)) : 0.0;
      curves[p].push_back(m);
      b.table().add_row(b.row({tf}, cfg.protocols[p], "simulation", {m, std::sqrt(var / T)}));
    }
  }
  auto& t = b.table();
  t.set_meta("trials", std::to_string(cfg.noisy() ? cfg.trials : 1));
  t.set_meta("decay.f0_mode", cfg.decay.f0_proportional ? "proportional" : "fixed");
  t.set_meta("decay.bandwidth_mode", cfg.decay.fractional_bandwidth ? "fractional" : "absolute");
  if (cfg.duration_us.size() >= 2) {
    for (std::size_t p = 0; p < np; ++p) {
      const DecayFit fit = fit_stretched_exponential(cfg.duration_us, curves[p]);
      t.set_meta("fit." + cfg.protocols[p] + ".t_1e_us", format_number(fit.T));
      t.set_meta("fit." + cfg.protocols[p] + ".p", format_number(fit.p));
    }
  }
  t.set_meta("plot.kind", "line");
  t.set_meta("plot.x", "duration_us");
  t.set_meta("plot.y", "sz");
  return t;
}

}  // namespace

ResultTable run_sweep(const SweepConfig& cfg, int threads) {
  if (threads < 1) threads = 1;
  cfg.filter.validate();
  cfg.readout.validate();
  if (cfg.noise) cfg.noise->validate();
  ResultTable t;
  switch (cfg.experiment) {
    case Experiment::freq_response:
    case Experiment::dual_band:
      t = freq_response(cfg, threads);
      break;
    case Experiment::phase_sweep:
      t = phase_sweep(cfg, threads);
      break;
    case Experiment::amplitude_sweep:
      t = amplitude_sweep(cfg, threads);
      break;
    case Experiment::filter_center_map:
      t = filter_center_map(cfg, threads);
      break;
    case Experiment::cpmg_map:
      t = cpmg_map(cfg, threads);
      break;
    case Experiment::amplitude_robustness:
      t = amplitude_robustness(cfg, threads);
      break;
    case Experiment::duration_decay:
      t = duration_decay(cfg, threads);
      break;
  }
  ResultTable out(t.columns());
  common_meta(out, cfg);
  for (const auto& kv : t.metadata()) out.set_meta(kv.first, kv.second);
  for (std::size_t r = 0; r < t.rows(); ++r) out.add_row(t.row(r));
  return out;
}

}  // namespace qif
