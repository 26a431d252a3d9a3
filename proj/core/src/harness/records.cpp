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

#include "bivi/harness/records.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace bivi {
namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RecordTable::RecordTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

std::optional<std::size_t> RecordTable::index_of(std::string_view column) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i] == column) return i;
  }
  return std::nullopt;
}

std::vector<double> RecordTable::column(std::string_view name) const {
  const auto idx = index_of(name);
  if (!idx) throw ConfigError("records have no column '" + std::string(name) + "'");
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r[*idx]);
  return out;
}

double RecordTable::at(std::size_t row, std::string_view name) const {
  const auto idx = index_of(name);
  if (!idx) throw ConfigError("records have no column '" + std::string(name) + "'");
  return rows_.at(row)[*idx];
}

void RecordTable::add_row(std::vector<double> values) {
  if (values.size() != columns_.size()) {
    throw DimensionError("record row has " + std::to_string(values.size()) +
                         " cells for " + std::to_string(columns_.size()) + " columns");
  }
  rows_.push_back(std::move(values));
}

std::string RecordTable::to_csv() const {
  std::string out;
  const bool labeled = !run_id_.empty();
  if (labeled) out += "run_id";
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i || labeled) out += ',';
    out += columns_[i];
  }
  out += '\n';
  for (const auto& r : rows_) {
    if (labeled) out += run_id_;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i || labeled) out += ',';
      out += format_double(r[i]);
    }
    out += '\n';
  }
  return out;
}

void RecordTable::write_csv(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << to_csv();
  if (!f) throw Error("write failed for " + path);
}

RecordTable RecordTable::parse_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  if (lines.empty()) throw ConfigError("records file is empty (no header)");
  std::vector<std::string> columns;
  auto header = split(lines[0]);
  const bool labeled = !header.empty() && header[0] == "run_id";
  for (std::size_t i = labeled ? 1 : 0; i < header.size(); ++i) columns.emplace_back(header[i]);
  RecordTable t(std::move(columns));
  for (std::size_t li = 1; li < lines.size(); ++li) {
    auto cells = split(lines[li]);
    if (labeled && !cells.empty()) {
      t.run_id_ = std::string(cells.front());
      cells.erase(cells.begin());
    }
    if (cells.size() != t.columns_.size()) {
      throw ConfigError("records line " + std::to_string(li + 1) + " has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(t.columns_.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells) {
      if (c.empty()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      const std::string s(c);
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (end == s.c_str() || *end != '\0') {
        throw ConfigError("records line " + std::to_string(li + 1) + ": bad number '" + s + "'");
      }
      row.push_back(v);
    }
    t.rows_.push_back(std::move(row));
  }
  return t;
}

RecordTable RecordTable::read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open records file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace bivi
