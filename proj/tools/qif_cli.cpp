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

// Command-line front end. Uses only the C interface of libqif.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "qif/qif.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;

struct BufferDeleter {
  void operator()(qif_buffer* b) const { qif_buffer_free(b); }
};
struct TableDeleter {
  void operator()(qif_table* t) const { qif_table_free(t); }
};
using Buffer = std::unique_ptr<qif_buffer, BufferDeleter>;
using Table = std::unique_ptr<qif_table, TableDeleter>;

struct Args {
  std::string config;
  std::string out_dir;
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool has_seed = false;
  int threads = 0;
};

int report(qif_status st) {
  std::cerr << "qif: " << qif_last_error() << "\n";
  return static_cast<int>(st);
}

bool read_file(const std::string& path, std::string& text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  text = ss.str();
  return true;
}

// Writes to <out_dir>/<name> when --out is given, stdout otherwise.
int emit(const Args& a, const std::string& name, const char* data, std::size_t size) {
  if (a.out_dir.empty()) {
    std::fwrite(data, 1, size, stdout);
    return kExitOk;
  }
  const std::string path = a.out_dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(data, static_cast<std::streamsize>(size))) {
    std::cerr << "qif: cannot write " << path << "\n";
    return kExitInvalid;
  }
  std::cout << path << "\n";
  return kExitOk;
}

qif_options options(const Args& a) {
  qif_options o;
  qif_options_init(&o);
  o.threads = a.threads;
  o.has_seed = a.has_seed ? 1 : 0;
  o.seed = a.seed;
  o.format = a.format == "json" ? QIF_FORMAT_JSON : QIF_FORMAT_CSV;
  return o;
}

int run_command(const Args& a, const std::string& command, const std::string& stem, bool plain_text) {
  std::string cfg;
  if (!read_file(a.config, cfg)) {
    std::cerr << "qif: cannot read config " << a.config << "\n";
    return kExitInvalid;
  }
  const qif_options o = options(a);
  qif_buffer* raw = nullptr;
  const qif_status st = qif_command_run(command.c_str(), cfg.c_str(), &o, &raw);
  Buffer buf(raw);
  if (st != QIF_OK) return report(st);
  const std::string ext = plain_text ? "txt" : a.format;
  return emit(a, stem + "." + ext, qif_buffer_data(buf.get()), qif_buffer_size(buf.get()));
}

int run_sweep(const Args& a, const std::string& experiment) {
  std::string cfg;
  if (!read_file(a.config, cfg)) {
    std::cerr << "qif: cannot read config " << a.config << "\n";
    return kExitInvalid;
  }
  const qif_options o = options(a);
  qif_table* raw = nullptr;
  qif_status st = qif_sweep_run(cfg.c_str(), experiment.c_str(), &o, &raw);
  Table table(raw);
  if (st != QIF_OK) return report(st);
  qif_buffer* rb = nullptr;
  st = qif_table_render(table.get(), o.format, &rb);
  Buffer buf(rb);
  if (st != QIF_OK) return report(st);
  return emit(a, experiment + "." + a.format, qif_buffer_data(buf.get()), qif_buffer_size(buf.get()));
}

int run_plot(const Args& a, const std::string& input, const std::string& kind) {
  std::string csv;
  if (!read_file(input, csv)) {
    std::cerr << "qif: cannot read table " << input << "\n";
    return kExitInvalid;
  }
  qif_table* raw = nullptr;
  qif_status st = qif_table_from_csv(csv.c_str(), &raw);
  Table table(raw);
  if (st != QIF_OK) return report(st);
  qif_buffer* rb = nullptr;
  st = qif_table_plot_svg(table.get(), kind.c_str(), &rb);
  Buffer buf(rb);
  if (st != QIF_OK) return report(st);
  std::string stem = input.substr(input.find_last_of('/') + 1);
  stem = stem.substr(0, stem.find_last_of('.'));
  return emit(a, stem + ".svg", qif_buffer_data(buf.get()), qif_buffer_size(buf.get()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum invariant filtering toolkit"};
  app.set_version_flag("--version", std::string(qif_version()));
  app.require_subcommand(1);

  Args a;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", a.config, "JSON config file");
    if (config_required) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", a.out_dir, "output directory (default: stdout)")->check(CLI::ExistingDirectory);
    sub->add_option("--format", a.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option_function<std::uint64_t>(
        "--seed",
        [&](const std::uint64_t& s) {
          a.seed = s;
          a.has_seed = true;
        },
        "RNG seed, overrides the config");
    sub->add_option("--threads", a.threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  };

  auto* design = app.add_subcommand("design", "design a filter kernel");
  auto* fields = app.add_subcommand("fields", "compute control fields epsilon(t), Delta(t)");
  auto* simulate = app.add_subcommand("simulate", "run one protocol");
  auto* sweep = app.add_subcommand("sweep", "run an experiment sweep");
  auto* cpmg = app.add_subcommand("cpmg", "CPMG filter response");
  auto* wave = app.add_subcommand("export-waveform", "export epsilon(t) as a waveform file");
  auto* plot = app.add_subcommand("plot", "render a result table as SVG");
  for (auto* s : {design, fields, simulate, sweep, cpmg, wave}) add_common(s, true);
  add_common(plot, false);

  std::string experiment;
  sweep->add_option("experiment", experiment, "experiment name")->required();
  std::string table_path, kind = "line";
  plot->add_option("table", table_path, "CSV result table")->required()->check(CLI::ExistingFile);
  plot->add_option("--kind", kind, "line or heatmap")->check(CLI::IsMember({"line", "heatmap"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*design) return run_command(a, "design", "kernel", false);
    if (*fields) return run_command(a, "fields", "fields", false);
    if (*simulate) return run_command(a, "simulate", "simulate", false);
    if (*cpmg) return run_command(a, "cpmg", "cpmg", false);
    if (*wave) return run_command(a, "export-waveform", "waveform", true);
    if (*sweep) return run_sweep(a, experiment);
    if (*plot) return run_plot(a, table_path, kind);
  } catch (const std::exception& e) {
    std::cerr << "qif: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInvalid;
}
