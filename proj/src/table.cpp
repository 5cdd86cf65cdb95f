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

#include "qif/table.hpp"

#include <cmath>
#include <cstdlib>
#include <json.hpp>
#include <sstream>

#include "qif/error.hpp"
#include "qif/util.hpp"

namespace qif {

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) throw InvalidInput("result row width does not match the header");
  rows_.push_back(std::move(row));
}

void ResultTable::set_meta(const std::string& key, const std::string& value) {
  if (key.find_first_of("=\n") != std::string::npos || value.find('\n') != std::string::npos)
    throw InvalidInput("metadata key/value contains a reserved character");
  for (auto& kv : meta_)
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  meta_.emplace_back(key, value);
}

std::string ResultTable::meta(const std::string& key, const std::string& fallback) const {
  for (const auto& kv : meta_)
    if (kv.first == key) return kv.second;
  return fallback;
}

int ResultTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i] == name) return static_cast<int>(i);
  return -1;
}

std::size_t ResultTable::require_column(const std::string& name) const {
  const int i = column_index(name);
  if (i < 0) throw InvalidInput("table has no column '" + name + "'");
  return static_cast<std::size_t>(i);
}

double ResultTable::number(std::size_t r, std::size_t c) const {
  const Cell& cell = rows_.at(r).at(c);
  if (const double* d = std::get_if<double>(&cell)) return *d;
  throw InvalidInput("table cell in column '" + columns_.at(c) + "' is not numeric");
}

std::string ResultTable::text(std::size_t r, std::size_t c) const {
  const Cell& cell = rows_.at(r).at(c);
  if (const std::string* s = std::get_if<std::string>(&cell)) return *s;
  return format_number(std::get<double>(cell));
}

std::string ResultTable::to_csv() const {
  std::string out;
  for (const auto& kv : meta_) out += "# " + kv.first + "=" + kv.second + "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += columns_[i];
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (const double* d = std::get_if<double>(&row[i]))
        out += format_number(*d);
      else
        out += std::get<std::string>(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string ResultTable::to_json() const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json m = nlohmann::ordered_json::object();
  for (const auto& kv : meta_) m[kv.first] = kv.second;
  j["metadata"] = m;
  j["columns"] = columns_;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : rows_) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const auto& c : row) {
      if (const double* d = std::get_if<double>(&c)) {
        // Round-trip through the CSV formatting so both outputs agree.
        r.push_back(std::strtod(format_number(*d).c_str(), nullptr));
      } else {
        r.push_back(std::get<std::string>(c));
      }
    }
    rows.push_back(r);
  }
  j["rows"] = rows;
  return j.dump(1);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

ResultTable ResultTable::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  ResultTable t;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) t.meta_.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
      continue;
    }
    auto fields = split_csv_line(line);
    if (!have_header) {
      t.columns_ = fields;
      have_header = true;
      continue;
    }
    if (fields.size() != t.columns_.size()) throw InvalidInput("CSV row width does not match its header");
    std::vector<Cell> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (!f.empty() && end && *end == '\0')
        row.emplace_back(v);
      else
        row.emplace_back(f);
    }
    t.rows_.push_back(std::move(row));
  }
  if (!have_header) throw InvalidInput("CSV has no header row");
  return t;
}

}  // namespace qif
