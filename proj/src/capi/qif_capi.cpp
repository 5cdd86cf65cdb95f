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

#include "qif/qif.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "qif/commands.hpp"
#include "qif/dynamics.hpp"
#include "qif/error.hpp"
#include "qif/experiments.hpp"
#include "qif/filter.hpp"
#include "qif/invariant.hpp"
#include "qif/plot.hpp"
#include "qif/table.hpp"
#include "qif/util.hpp"

#ifndef QIF_VERSION_STRING
#define QIF_VERSION_STRING "dev"
#endif

struct qif_buffer {
  std::string text;
};
struct qif_filter {
  qif::ImpulseResponse h;
};
struct qif_fields {
  qif::ControlFields f;
};
struct qif_table {
  qif::ResultTable t;
};

namespace {

thread_local std::string g_error;

template <class F>
qif_status guard(F&& f) {
  g_error.clear();
  try {
    f();
    return QIF_OK;
  } catch (const qif::InvalidInput& e) {
    g_error = e.what();
    return QIF_ERR_INVALID;
  } catch (const qif::NumericalFailure& e) {
    g_error = e.what();
    return QIF_ERR_NUMERICAL;
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return QIF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_error = e.what();
    return QIF_ERR_INTERNAL;
  } catch (...) {
    g_error = "unknown error";
    return QIF_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw qif::InvalidInput(std::string(what) + " must not be NULL");
}

qif::CommandOptions to_options(const qif_options* opt) {
  qif::CommandOptions o;
  if (!opt) return o;
  o.threads = opt->threads > 0 ? opt->threads : qif::default_threads();
  if (opt->has_seed) o.seed = opt->seed;
  if (opt->format != QIF_FORMAT_CSV && opt->format != QIF_FORMAT_JSON) throw qif::InvalidInput("unknown format");
  o.format = opt->format == QIF_FORMAT_JSON ? qif::OutputFormat::json : qif::OutputFormat::csv;
  return o;
}

void copy_out(const std::vector<double>& v, double* out, std::size_t n, double scale = 1.0) {
  need(out, "output buffer");
  if (n < v.size()) throw qif::InvalidInput("output buffer is too small");
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * scale;
}

}  // namespace

extern "C" {

const char* qif_version(void) { return QIF_VERSION_STRING; }
const char* qif_last_error(void) { return g_error.c_str(); }

void qif_options_init(qif_options* opt) {
  if (!opt) return;
  opt->threads = 1;
  opt->has_seed = 0;
  opt->seed = 0;
  opt->format = QIF_FORMAT_CSV;
}

const char* qif_buffer_data(const qif_buffer* b) { return b ? b->text.c_str() : ""; }
size_t qif_buffer_size(const qif_buffer* b) { return b ? b->text.size() : 0; }
void qif_buffer_free(qif_buffer* b) { delete b; }

qif_status qif_filter_design(const char* spec_json, qif_filter** out) {
  return guard([&] {
    need(spec_json, "spec_json");
    need(out, "out");
    *out = nullptr;
    auto* f = new qif_filter{qif::design_filter(qif::FilterSpec::from_json(spec_json))};
    *out = f;
  });
}

size_t qif_filter_size(const qif_filter* f) { return f ? f->h.size() : 0; }
double qif_filter_dt(const qif_filter* f) { return f ? f->h.dt() : 0.0; }

qif_status qif_filter_samples(const qif_filter* f, double* out, size_t n) {
  return guard([&] {
    need(f, "filter");
    copy_out(f->h.samples(), out, n);
  });
}

qif_status qif_filter_magnitude(const qif_filter* f, const double* freq_mhz, double* out, size_t n) {
  return guard([&] {
    need(f, "filter");
    need(freq_mhz, "freq_mhz");
    need(out, "out");
    const std::vector<double> grid(freq_mhz, freq_mhz + n);
    const auto mag = qif::transfer_function(f->h, grid).magnitude();
    copy_out(mag, out, n);
  });
}

void qif_filter_free(qif_filter* f) { delete f; }

qif_status qif_fields_from_filter(const qif_filter* f, const char* mode, qif_fields** out) {
  return guard([&] {
    need(f, "filter");
    need(out, "out");
    *out = nullptr;
    const qif::AuxMode m = mode ? qif::aux_mode_from_string(mode) : qif::AuxMode::exact_arcsin;
    *out = new qif_fields{qif::qif_fields(f->h, m)};
  });
}

size_t qif_fields_size(const qif_fields* c) { return c ? c->f.size() : 0; }
double qif_fields_dt(const qif_fields* c) { return c ? c->f.dt : 0.0; }

qif_status qif_fields_epsilon(const qif_fields* c, double* out, size_t n) {
  return guard([&] {
    need(c, "fields");
    copy_out(c->f.epsilon, out, n, c->f.epsilon_scale);
  });
}

qif_status qif_fields_delta(const qif_fields* c, double* out, size_t n) {
  return guard([&] {
    need(c, "fields");
    copy_out(c->f.delta, out, n);
  });
}

qif_status qif_fields_closure(const qif_fields* c, double dt_us, double* sz) {
  return guard([&] {
    need(c, "fields");
    need(sz, "sz");
    qif::StepConfig cfg;
    cfg.dt = dt_us;
    *sz = qif::simulate_protocol(c->f, nullptr, nullptr, cfg).final_expectations.sz;
  });
}

void qif_fields_free(qif_fields* c) { delete c; }

qif_status qif_sweep_run(const char* config_json, const char* experiment, const qif_options* opt, qif_table** out) {
  return guard([&] {
    need(config_json, "config_json");
    need(out, "out");
    *out = nullptr;
    const qif::CommandOptions o = to_options(opt);
    std::optional<std::string> ex;
    if (experiment) ex = experiment;
    const auto cfg = qif::SweepConfig::from_json(config_json, o.seed, ex);
    *out = new qif_table{qif::run_sweep(cfg, o.threads)};
  });
}

qif_status qif_table_from_csv(const char* csv, qif_table** out) {
  return guard([&] {
    need(csv, "csv");
    need(out, "out");
    *out = nullptr;
    *out = new qif_table{qif::ResultTable::from_csv(csv)};
  });
}

size_t qif_table_rows(const qif_table* t) { return t ? t->t.rows() : 0; }
size_t qif_table_cols(const qif_table* t) { return t ? t->t.cols() : 0; }

qif_status qif_table_render(const qif_table* t, qif_format format, qif_buffer** out) {
  return guard([&] {
    need(t, "table");
    need(out, "out");
    *out = nullptr;
    if (format != QIF_FORMAT_CSV && format != QIF_FORMAT_JSON) throw qif::InvalidInput("unknown format");
    *out = new qif_buffer{
        qif::render_table(t->t, format == QIF_FORMAT_JSON ? qif::OutputFormat::json : qif::OutputFormat::csv)};
  });
}

qif_status qif_table_plot_svg(const qif_table* t, const char* kind, qif_buffer** out) {
  return guard([&] {
    need(t, "table");
    need(kind, "kind");
    need(out, "out");
    *out = nullptr;
    *out = new qif_buffer{qif::render_svg(t->t, qif::plot_kind_from_string(kind))};
  });
}

void qif_table_free(qif_table* t) { delete t; }

qif_status qif_command_run(const char* command, const char* config_json, const qif_options* opt, qif_buffer** out) {
  return guard([&] {
    need(command, "command");
    need(config_json, "config_json");
    need(out, "out");
    *out = nullptr;
    const qif::CommandOptions o = to_options(opt);
    const std::string cmd = command;
    std::string text;
    if (cmd == "design")
      text = qif::command_design(config_json, o);
    else if (cmd == "fields")
      text = qif::command_fields(config_json, o);
    else if (cmd == "simulate")
      text = qif::command_simulate(config_json, o);
    else if (cmd == "cpmg")
      text = qif::render_table(qif::command_cpmg(config_json, o), o.format);
    else if (cmd == "export-waveform")
      text = qif::command_export_waveform(config_json, o);
    else
      throw qif::InvalidInput("unknown command '" + cmd + "'");
    *out = new qif_buffer{std::move(text)};
  });
}

}  // extern "C"
