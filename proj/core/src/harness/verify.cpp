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

#include "bivi/harness/verify.hpp"

#include <cmath>
#include <string>

namespace bivi {
namespace {

constexpr double kBoundTol = 1e-6;
constexpr double kGapSignTol = 1e-9;
constexpr std::size_t kMaxMessages = 50;

void note(VerifyResult& r, const std::string& msg) {
  ++r.violations;
  if (r.messages.size() < kMaxMessages) r.messages.push_back(msg);
}

}  // namespace

VerifyResult verify_records(const RecordTable& table) {
  VerifyResult r;
  const auto& cols = table.columns();
  const auto k_idx = table.index_of("k");
  auto row_label = [&](std::size_t row) {
    return k_idx ? "k=" + format_double(table.rows()[row][*k_idx])
                 : "row " + std::to_string(row);
  };
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const std::string& name = cols[c];
    if (name.rfind("ub_", 0) == 0) {
      const auto sep = name.find("_by_");
      if (sep == std::string::npos) continue;
      const std::string measured = name.substr(3, sep - 3);
      const auto m_idx = table.index_of(measured);
      if (!m_idx) continue;
      for (std::size_t row = 0; row < table.size(); ++row) {
        const double ub = table.rows()[row][c];
        const double m = table.rows()[row][*m_idx];
        if (std::isnan(ub) || std::isnan(m)) continue;
        ++r.checked;
        if (!(m <= ub + kBoundTol)) {
          note(r, row_label(row) + ": " + measured + " = " + format_double(m) +
                      " exceeds " + name + " = " + format_double(ub));
        }
      }
    } else if (name.rfind("inv_", 0) == 0) {
      for (std::size_t row = 0; row < table.size(); ++row) {
        const double v = table.rows()[row][c];
        if (std::isnan(v)) continue;
        ++r.checked;
        if (!(v >= 0.0)) note(r, row_label(row) + ": " + name + " = " + format_double(v));
      }
    } else if (name.rfind("gap_fx", 0) == 0) {
      for (std::size_t row = 0; row < table.size(); ++row) {
        const double v = table.rows()[row][c];
        if (std::isnan(v)) continue;
        ++r.checked;
        if (!(v >= -kGapSignTol)) {
          note(r, row_label(row) + ": " + name + " = " + format_double(v) + " is negative");
        }
      }
    }
  }
  return r;
}

}  // namespace bivi
