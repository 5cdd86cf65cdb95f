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
#include <utility>
#include <variant>
#include <vector>

namespace qif {

using Cell = std::variant<double, std::string>;

/// Rectangular result table with string metadata. CSV form: one
/// "# key=value" line per metadata entry, then a header row and data rows.
class ResultTable {
 public:
  ResultTable() = default;
  explicit ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return columns_.size(); }
  const std::vector<Cell>& row(std::size_t r) const { return rows_.at(r); }

  void add_row(std::vector<Cell> row);
  void set_meta(const std::string& key, const std::string& value);
  const std::vector<std::pair<std::string, std::string>>& metadata() const { return meta_; }
  std::string meta(const std::string& key, const std::string& fallback = "") const;

  /// Index of a column, or -1.
  int column_index(const std::string& name) const;
  /// Throws InvalidInput if the column is missing.
  std::size_t require_column(const std::string& name) const;
  double number(std::size_t r, std::size_t c) const;
  std::string text(std::size_t r, std::size_t c) const;

  std::string to_csv() const;
  std::string to_json() const;
  static ResultTable from_csv(const std::string& text);

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
  std::vector<std::pair<std::string, std::string>> meta_;
};

}  // namespace qif
