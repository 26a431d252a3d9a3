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

#ifndef BIVI_HARNESS_EXPERIMENT_HPP_
#define BIVI_HARNESS_EXPERIMENT_HPP_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bivi/harness/config.hpp"
#include "bivi/harness/records.hpp"
#include "bivi/solver.hpp"

namespace bivi {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvariant = 2,
  kExitDivergence = 3,
  kExitConfig = 4,
};

struct RunOutcome {
  int exit_code = kExitOk;
  StopReason reason = StopReason::kMaxIters;
  long iterations = 0;
  bool invariants_ok = true;
  bool bounds_ok = true;
  RecordTable records;
  nlohmann::json summary;
};

/// Runs one experiment. Row k of the record table is written after
/// iteration k-1 and holds x_k, the ergodic means over j = 0..k-1, the
/// schedule values at k, and partial sums over j <= k-1. D_k needs the next
/// mean, so the last row leaves it empty.
///
/// With a non-empty `out_dir` the directory receives records.csv,
/// summary.json and config.json. Throws ConfigError for an invalid config;
/// divergence and invariant violations are reported through exit_code.
RunOutcome run_experiment(const RunConfig& config, const std::string& out_dir);

struct SweepVariant {
  std::string name;
  nlohmann::json patch;  // JSON merge patch applied to the base config
};

struct SweepOutcome {
  int exit_code = kExitOk;
  std::vector<std::string> names;
  std::vector<int> exit_codes;
  std::vector<std::string> errors;  // empty for variants that ran
  RecordTable compare;
};

/// Grid file: {"variants": [{"name": "IREG", "patch": {...}}, ...]}, at
/// least two variants with distinct names.
std::vector<SweepVariant> parse_grid(const nlohmann::json& grid);

/// Runs every variant into <out_dir>/<name>/ on up to `threads` workers and
/// writes <out_dir>/compare.csv (columns k, <name>.D_k, <name>.phi,
/// <name>.err aligned on k) and <out_dir>/sweep.json. A failed variant keeps
/// empty columns. The exit code is the largest variant exit code.
SweepOutcome run_sweep(const nlohmann::json& base, const std::vector<SweepVariant>& variants,
                       const std::string& out_dir, unsigned threads);

/// Worker count: BIVI_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned thread_budget();

}  // namespace bivi

#endif  // BIVI_HARNESS_EXPERIMENT_HPP_
