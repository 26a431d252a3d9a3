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

#ifndef BIVI_HARNESS_VERIFY_HPP_
#define BIVI_HARNESS_VERIFY_HPP_

#include <string>
#include <vector>

#include "bivi/harness/records.hpp"

namespace bivi {

struct VerifyResult {
  long checked = 0;
  long violations = 0;
  std::vector<std::string> messages;  // one per violation, capped at 50
  bool ok() const { return violations == 0; }
};

/// Re-checks a record table:
///   ub_<m>_by_<b>   measured column m <= bound + 1e-6 wherever both exist
///   inv_*           residual slack >= 0
///   gap_fx*         >= -1e-9
VerifyResult verify_records(const RecordTable& table);

}  // namespace bivi

#endif  // BIVI_HARNESS_VERIFY_HPP_
