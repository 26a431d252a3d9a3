// Copyright 2026 The bivi Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BIVI_HARNESS_RECORDS_HPP_
#define BIVI_HARNESS_RECORDS_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bivi/common.hpp"

namespace bivi {

/// Column-ordered numeric table. Missing cells are NaN and serialize as
/// empty CSV fields; numbers are written with 17 significant digits so a
/// re-read reproduces every double exactly. A non-empty run id is written as
/// a leading `run_id` column.
class RecordTable {
 public:
  RecordTable() = default;
  explicit RecordTable(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  const std::string& run_id() const { return run_id_; }
  void set_run_id(std::string id) { run_id_ = std::move(id); }

  std::optional<std::size_t> index_of(std::string_view column) const;
  // Throws ConfigError for an unknown column.
  std::vector<double> column(std::string_view name) const;
  double at(std::size_t row, std::string_view column) const;

  void add_row(std::vector<double> values);

  void write_csv(const std::string& path) const;
  std::string to_csv() const;
  static RecordTable read_csv(const std::string& path);
  static RecordTable parse_csv(std::string_view text);

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
  std::string run_id_;
};

std::string format_double(double v);

}  // namespace bivi

#endif  // BIVI_HARNESS_RECORDS_HPP_
