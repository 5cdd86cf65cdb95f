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

#include "qif/commands.hpp"

#include <cmath>

#include "config_json.hpp"
#include "qif/cpmg.hpp"
#include "qif/dynamics.hpp"
#include "qif/error.hpp"
#include "qif/filter.hpp"
#include "qif/invariant.hpp"
#include "qif/noise.hpp"
#include "qif/response.hpp"
#include "qif/util.hpp"
#include "qif/waveform.hpp"

namespace qif {

OutputFormat output_format_from_string(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw InvalidInput("format must be csv or json");
}

std::string render_table(const ResultTable& t, OutputFormat f) {
  return f == OutputFormat::csv ? t.to_csv() : t.to_json() + "\n";
}

namespace {

FilterSpec filter_of(const json& j) {
  if (!j.contains("filter")) throw InvalidInput("filter: missing");
  return FilterSpec::from_json(j["filter"].dump());
}

AuxMode mode_of(const json& j) {
  try {
    return j.contains("mode") ? aux_mode_from_string(j["mode"].get<std::string>()) : AuxMode::exact_arcsin;
  } catch (const json::exception&) {
    throw InvalidInput("mode: wrong type");
  }
}

double scale_of(const json& j) {
  double s = 1.0;
  try {
    s = j.value("scale", 1.0);
  } catch (const json::exception&) {
    throw InvalidInput("scale: wrong type");
  }
  if (!std::isfinite(s)) throw InvalidInput("scale must be finite");
  return s;
}

ControlFields fields_of(const json& j) {
  return qif_fields(design_filter(filter_of(j)), mode_of(j)).scaled(scale_of(j));
}

json samples_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(std::strtod(format_number(x).c_str(), nullptr));
  return a;
}

}  // namespace

std::string command_design(const std::string& config, const CommandOptions& opt) {
  const json j = parse_json_object(config, "config");
  const FilterSpec spec = j.contains("filter") ? filter_of(j) : FilterSpec::from_json(config);
  const ImpulseResponse h = design_filter(spec);
  if (opt.format == OutputFormat::csv) return h.to_csv();
  json out;
  out["filter"] = json::parse(spec.to_json());
  out["dt_us"] = h.dt();
  out["symmetric"] = h.is_symmetric();
  out["overlap_warning"] = h.overlap_warning();
  out["samples"] = samples_json(h.samples());
  return out.dump(1) + "\n";
}

std::string command_fields(const std::string& config, const CommandOptions& opt) {
  const json j = parse_json_object(config, "config");
  const ControlFields f = fields_of(j);
  if (opt.format == OutputFormat::csv) return f.to_csv();
  json out;
  out["dt_us"] = f.dt;
  out["epsilon_scale"] = f.epsilon_scale;
  std::vector<double> eps(f.epsilon), del(f.delta);
  for (double& e : eps) e *= f.epsilon_scale;
  out["epsilon_rad_per_us"] = samples_json(eps);
  out["delta_rad_per_us"] = samples_json(del);
  return out.dump(1) + "\n";
}

std::string command_simulate(const std::string& config, const CommandOptions& opt) {
  const json j = parse_json_object(config, "config");
  const ImpulseResponse h = design_filter(filter_of(j));
  const AuxMode mode = mode_of(j);
  const AuxiliaryFields aux = aux_from_impulse(h, mode);
  const ControlFields fields = fields_from_aux(aux).scaled(scale_of(j));
  StepConfig step = j.contains("step") ? parse_step(j["step"]) : StepConfig{};

  std::optional<SignalSpec> sig;
  try {
    if (j.contains("signal")) {
      const json& s = j["signal"];
      if (!s.is_object()) throw InvalidInput("signal must be an object");
      const Waveform w = waveform_from_string(s.value("waveform", std::string("cosine")));
      if (w == Waveform::samples) {
        if (!s.contains("samples") || !s["samples"].is_array())
          throw InvalidInput("signal.samples must be an array");
        sig = SignalSpec::from_samples(s.value("sample_dt_us", 0.0), s["samples"].get<std::vector<double>>(),
                                       s.value("amplitude", 0.0));
      } else {
        const double f = s.value("frequency_mhz", 0.0), d = s.value("amplitude", 0.0), p = s.value("phase_rad", 0.0);
        sig = w == Waveform::sine ? SignalSpec::sine(f, d, p) : SignalSpec::cosine(f, d, p);
      }
      sig->validate();
    }
  } catch (const json::exception&) {
    throw InvalidInput("signal: wrong field type");
  }

  std::optional<NoiseModel> noise;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  if (j.contains("noise")) {
    json n = j["noise"];
    if (!n.is_object()) throw InvalidInput("noise must be an object");
    if (n.contains("seed")) throw InvalidInput("noise.seed: use the top-level seed");
    if (!n.contains("rms_amplitude")) n["rms_amplitude"] = 0.5;
    noise = NoiseModel::from_json(n.dump());
    if (opt.seed) {
      seed = *opt.seed;
    } else if (j.contains("seed") && j["seed"].is_number_unsigned()) {
      seed = j["seed"].get<std::uint64_t>();
    } else {
      throw InvalidInput("seed: missing (required when noise is set)");
    }
    noise->seed = seed;
    if (j.contains("trials")) {
      if (!j["trials"].is_number_integer() || j["trials"].get<long long>() < 1)
        throw InvalidInput("trials must be a positive integer");
      trials = j["trials"].get<std::size_t>();
    }
  }

  const SignalSpec* sp = sig ? &*sig : nullptr;
  json out;
  if (noise && trials > 1) {
    const EnsembleResult e = ensemble_average(fields, sp, *noise, trials, step, opt.threads);
    out["trials"] = trials;
    out["sx"] = e.mean.sx;
    out["sy"] = e.mean.sy;
    out["sz"] = e.mean.sz;
    out["sz_stderr"] = e.stderr_.sz;
  } else {
    std::optional<NoiseTrace> nt;
    if (noise) {
      const auto n = std::max<long long>(1, std::llround(fields.duration() / step.dt));
      nt = synthesize(*noise, fields.duration(), fields.duration() / static_cast<double>(n), 0);
    }
    const PropagationResult r = simulate_protocol(fields, sp, nt ? &*nt : nullptr, step);
    out = json::parse(r.to_json());
    if (step.trajectory_store && opt.format == OutputFormat::csv) return r.trajectory_csv();
    if (step.trajectory_store) {
      json tr = json::array();
      for (const auto& row : r.trajectory) tr.push_back({row[0], row[1], row[2], row[3]});
      out["trajectory"] = tr;
    }
  }
  if (noise) out["seed"] = seed;
  if (sp && sp->waveform != Waveform::samples && aux.alpha_pi) {
    const ResponsePrediction m = magnus_predict(aux, *sp, Quadrature{4});
    out["predicted_sz"] = m.second_order_sz;
    out["magnus_sz"] = m.magnus_sz;
  }
  if (opt.format == OutputFormat::json) return out.dump(1) + "\n";
  ResultTable t({"quantity", "value"});
  for (auto it = out.begin(); it != out.end(); ++it)
    if (it->is_number()) t.add_row({it.key(), it->get<double>()});
  return t.to_csv();
}

ResultTable command_cpmg(const std::string& config, const CommandOptions& opt) {
  const json j = parse_json_object(config, "config");
  int n = 4;
  double tf = 4.0, width = 0.0, scale = 1.0, delta = 0.01;
  PulseAxis axis = PulseAxis::x;
  std::vector<double> grid = linspace_step(0.0, 4.0, 0.01);
  try {
    if (j.contains("cpmg")) {
      const json& c = j["cpmg"];
      if (!c.is_object()) throw InvalidInput("cpmg must be an object");
      n = c.value("n_pulses", n);
      tf = c.value("t_f_us", tf);
      width = c.value("pulse_width_us", width);
      scale = c.value("scale", scale);
      const std::string a = c.value("axis", std::string("x"));
      if (a != "x" && a != "y") throw InvalidInput("cpmg.axis must be x or y");
      axis = a == "x" ? PulseAxis::x : PulseAxis::y;
    }
    if (j.contains("signal")) delta = j["signal"].value("amplitude", delta);
    if (j.contains("sweep") && j["sweep"].contains("freq_mhz")) grid = parse_axis(j["sweep"]["freq_mhz"], "sweep.freq_mhz");
  } catch (const json::exception&) {
    throw InvalidInput("cpmg config: wrong field type");
  }
  if (n < 1) throw InvalidInput("cpmg.n_pulses must be >= 1");
  const StepConfig step = j.contains("step") ? parse_step(j["step"]) : StepConfig{};
  const PulseSequence seq = build_cpmg(n, tf, width, scale, axis);
  const CpmgResponse r = cpmg_filter_response(seq, grid, delta, step, opt.threads);
  ResultTable t({"freq_mhz", "deficit", "simulated", "analytic"});
  for (std::size_t i = 0; i < grid.size(); ++i) t.add_row({grid[i], r.deficit[i], r.simulated[i], r.analytic[i]});
  t.set_meta("n_pulses", std::to_string(n));
  t.set_meta("t_f_us", format_number(tf));
  t.set_meta("pulse_width_us", format_number(width));
  t.set_meta("probe_amplitude", format_number(delta));
  t.set_meta("plot.kind", "line");
  t.set_meta("plot.x", "freq_mhz");
  t.set_meta("plot.y", "simulated");
  return t;
}

std::string command_export_waveform(const std::string& config, const CommandOptions&) {
  const json j = parse_json_object(config, "config");
  WaveformOptions w;
  try {
    if (j.contains("waveform")) {
      const json& s = j["waveform"];
      if (!s.is_object()) throw InvalidInput("waveform must be an object");
      w.dt_ns = s.value("dt_ns", w.dt_ns);
      const long long m = s.value("max_samples", static_cast<long long>(w.max_samples));
      if (m < 1) throw InvalidInput("waveform.max_samples must be positive");
      w.max_samples = static_cast<std::size_t>(m);
    }
  } catch (const json::exception&) {
    throw InvalidInput("waveform: wrong field type");
  }
  return export_waveform(fields_of(j), w).to_text();
}

}  // namespace qif
