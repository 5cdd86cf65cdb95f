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

#include "qif/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "qif/error.hpp"
#include "qif/util.hpp"

namespace qif {

PlotKind plot_kind_from_string(const std::string& s) {
  if (s == "line") return PlotKind::line;
  if (s == "heatmap") return PlotKind::heatmap;
  throw InvalidInput("plot kind must be line or heatmap");
}

namespace {

constexpr double kW = 720, kH = 460, kL = 70, kR = 170, kT = 30, kB = 55;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v == 0.0 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kL + (x - x0) / (x1 - x0) * (kW - kL - kR); }
  double py(double y) const { return kH - kB - (y - y0) / (y1 - y0) * (kH - kT - kB); }
};

void widen(double& lo, double& hi) {
  if (hi == lo) {
    const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
    lo -= d;
    hi += d;
  }
}

std::string header() {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", kW) + "\" height=\"" + fmt("%.0f", kH) +
         "\" viewBox=\"0 0 " + fmt("%.0f", kW) + " " + fmt("%.0f", kH) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string axes(const Frame& f, const std::string& xl, const std::string& yl) {
  std::string s;
  s += "<rect x=\"" + fmt("%.2f", kL) + "\" y=\"" + fmt("%.2f", kT) + "\" width=\"" + fmt("%.2f", kW - kL - kR) +
       "\" height=\"" + fmt("%.2f", kH - kT - kB) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    s += "<text x=\"" + fmt("%.2f", f.px(xv)) + "\" y=\"" + fmt("%.2f", kH - kB + 16) +
         "\" text-anchor=\"middle\">" + fmt("%.4g", xv) + "</text>\n";
    s += "<text x=\"" + fmt("%.2f", kL - 6) + "\" y=\"" + fmt("%.2f", f.py(yv) + 4) +
         "\" text-anchor=\"end\">" + fmt("%.4g", yv) + "</text>\n";
  }
  s += "<text x=\"" + fmt("%.2f", kL + (kW - kL - kR) / 2) + "\" y=\"" + fmt("%.2f", kH - 12) +
       "\" text-anchor=\"middle\">" + escape(xl) + "</text>\n";
  s += "<text transform=\"translate(16," + fmt("%.2f", kT + (kH - kT - kB) / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">" + escape(yl) + "</text>\n";
  return s;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

// Five-stop perceptual ramp (dark blue -> yellow).
std::string ramp(double u) {
  static const double stops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  u = std::clamp(u, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(u));
  const double t = u - i;
  char buf[16];
  int rgb[3];
  for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(std::lround(stops[i][c] + t * (stops[i + 1][c] - stops[i][c])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string series_key(const ResultTable& t, std::size_t r, int pc, int sc) {
  std::string k;
  if (pc >= 0) k += t.text(r, static_cast<std::size_t>(pc));
  if (sc >= 0) k += (k.empty() ? "" : " / ") + t.text(r, static_cast<std::size_t>(sc));
  return k.empty() ? "data" : k;
}

std::string render_line(const ResultTable& t) {
  const std::size_t xc = t.require_column(t.meta("plot.x", t.columns().front()));
  const std::size_t yc = t.require_column(t.meta("plot.y", "deficit"));
  const int pc = t.column_index("protocol"), sc = t.column_index("source");
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::vector<std::string> order;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const double x = t.number(r, xc), y = t.number(r, yc);
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    const std::string k = series_key(t, r, pc, sc);
    if (!series.count(k)) order.push_back(k);
    series[k].emplace_back(x, y);
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  if (order.empty()) throw InvalidInput("plot: no finite data points");
  widen(x0, x1);
  widen(y0, y1);
  const Frame f{x0, x1, y0, y1};
  std::string s = header() + axes(f, t.columns()[xc], t.columns()[yc]);
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto pts = series[order[i]];
    std::stable_sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first < b.first; });
    const char* col = kPalette[i % 8];
    const bool dashed = order[i].find("prediction") != std::string::npos;
    s += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" stroke-width=\"1.5\"" +
         (dashed ? " stroke-dasharray=\"5,3\"" : "") + " points=\"";
    for (std::size_t p = 0; p < pts.size(); ++p) {
      if (p) s += ' ';
      s += fmt("%.2f", f.px(pts[p].first)) + "," + fmt("%.2f", f.py(pts[p].second));
    }
    s += "\"/>\n";
    const double ly = kT + 14 + 18.0 * static_cast<double>(i);
    s += "<line x1=\"" + fmt("%.2f", kW - kR + 10) + "\" y1=\"" + fmt("%.2f", ly - 4) + "\" x2=\"" +
         fmt("%.2f", kW - kR + 34) + "\" y2=\"" + fmt("%.2f", ly - 4) + "\" stroke=\"" + col + "\" stroke-width=\"2\"" +
         (dashed ? " stroke-dasharray=\"5,3\"" : "") + "/>\n";
    s += "<text x=\"" + fmt("%.2f", kW - kR + 40) + "\" y=\"" + fmt("%.2f", ly) + "\">" + escape(order[i]) +
         "</text>\n";
  }
  return s + "</svg>\n";
}

std::string render_heatmap(const ResultTable& t) {
  const std::size_t xc = t.require_column(t.meta("plot.x", t.columns().front()));
  const std::size_t yc = t.require_column(t.meta("plot.y", t.columns().size() > 1 ? t.columns()[1] : ""));
  const std::size_t vc = t.require_column(t.meta("plot.value", "deficit"));
  const int sc = t.column_index("source");
  std::map<std::pair<double, double>, double> cell;
  std::set<double> xs, ys;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (sc >= 0 && t.text(r, static_cast<std::size_t>(sc)) != "simulation") continue;
    const double x = t.number(r, xc), y = t.number(r, yc), v = t.number(r, vc);
    xs.insert(x);
    ys.insert(y);
    cell[{x, y}] = v;
  }
  if (cell.empty()) throw InvalidInput("plot: no simulation rows for the heatmap");
  if (cell.size() != xs.size() * ys.size()) throw InvalidInput("plot: heatmap data is not a full grid");
  double v0 = INFINITY, v1 = -INFINITY;
  for (const auto& kv : cell) {
    v0 = std::min(v0, kv.second);
    v1 = std::max(v1, kv.second);
  }
  const std::vector<double> X(xs.begin(), xs.end()), Y(ys.begin(), ys.end());
  auto edges = [](const std::vector<double>& v) {
    std::vector<double> e(v.size() + 1);
    if (v.size() == 1) {
      e[0] = v[0] - 0.5;
      e[1] = v[0] + 0.5;
      return e;
    }
    for (std::size_t i = 1; i < v.size(); ++i) e[i] = 0.5 * (v[i - 1] + v[i]);
    e[0] = v[0] - (e[1] - v[0]);
    e[v.size()] = v.back() + (v.back() - e[v.size() - 1]);
    return e;
  };
  const auto ex = edges(X), ey = edges(Y);
  const Frame f{ex.front(), ex.back(), ey.front(), ey.back()};
  std::string s = header();
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = 0; j < Y.size(); ++j) {
      const double v = cell[{X[i], Y[j]}];
      const double u = v1 > v0 ? (v - v0) / (v1 - v0) : 0.0;
      const double xa = f.px(ex[i]), xb = f.px(ex[i + 1]);
      const double ya = f.py(ey[j + 1]), yb = f.py(ey[j]);
      s += "<rect x=\"" + fmt("%.2f", xa) + "\" y=\"" + fmt("%.2f", ya) + "\" width=\"" + fmt("%.2f", xb - xa) +
           "\" height=\"" + fmt("%.2f", yb - ya) + "\" fill=\"" + ramp(u) + "\"/>\n";
    }
  s += axes(f, t.columns()[xc], t.columns()[yc]);
  for (int i = 0; i <= 10; ++i) {
    const double u = i / 10.0;
    const double y = kH - kB - u * (kH - kT - kB);
    s += "<rect x=\"" + fmt("%.2f", kW - kR + 20) + "\" y=\"" + fmt("%.2f", y - (kH - kT - kB) / 10.0) +
         "\" width=\"16\" height=\"" + fmt("%.2f", (kH - kT - kB) / 10.0) + "\" fill=\"" + ramp(u) + "\"/>\n";
  }
  s += "<text x=\"" + fmt("%.2f", kW - kR + 40) + "\" y=\"" + fmt("%.2f", kT + 10) + "\">" + fmt("%.4g", v1) +
       "</text>\n";
  s += "<text x=\"" + fmt("%.2f", kW - kR + 40) + "\" y=\"" + fmt("%.2f", kH - kB) + "\">" + fmt("%.4g", v0) +
       "</text>\n";
  s += "<text x=\"" + fmt("%.2f", kW - kR + 20) + "\" y=\"" + fmt("%.2f", kH - kB + 20) + "\">" +
       escape(t.columns()[vc]) + "</text>\n";
  return s + "</svg>\n";
}

}  // namespace

std::string render_svg(const ResultTable& table, PlotKind kind) {
  if (table.rows() == 0 || table.cols() == 0) throw InvalidInput("plot: table is empty");
  return kind == PlotKind::line ? render_line(table) : render_heatmap(table);
}

void emit_plot(const ResultTable& table, PlotKind kind, const std::string& path) {
  write_text_file(path, render_svg(table, kind));
}

}  // namespace qif
