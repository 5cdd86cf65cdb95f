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

#include <cstdint>
#include <optional>
#include <string>

#include "qif/table.hpp"

namespace qif {

enum class OutputFormat { csv, json };

OutputFormat output_format_from_string(const std::string& s);

struct CommandOptions {
  std::optional<std::uint64_t> seed;
  int threads = 1;
  OutputFormat format = OutputFormat::csv;
};

// Each command takes the text of a JSON config and returns the rendered
// output. Config layouts are documented in docs/cli.md.

/// Kernel samples (t_us,h) or a JSON object with the spec and samples.
std::string command_design(const std::string& config, const CommandOptions& opt);
/// Control fields (t_us, epsilon, delta).
std::string command_fields(const std::string& config, const CommandOptions& opt);
/// Single protocol run with optional probe and noise, plus predictions.
std::string command_simulate(const std::string& config, const CommandOptions& opt);
/// CPMG filter response against a cosine probe, simulated and analytic.
ResultTable command_cpmg(const std::string& config, const CommandOptions& opt);
/// Waveform file text.
std::string command_export_waveform(const std::string& config, const CommandOptions& opt);

std::string render_table(const ResultTable& t, OutputFormat f);

}  // namespace qif
