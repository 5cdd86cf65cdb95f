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

#include <string>

#include "qif/table.hpp"

namespace qif {

enum class PlotKind { line, heatmap };

PlotKind plot_kind_from_string(const std::string& s);

/// Self-contained SVG rendering of a result table. Column choice comes from
/// the table metadata (plot.x, plot.y, plot.value) with fallbacks; rows are
/// grouped into series by the protocol and source columns when present.
std::string render_svg(const ResultTable& table, PlotKind kind);
void emit_plot(const ResultTable& table, PlotKind kind, const std::string& path);

}  // namespace qif
