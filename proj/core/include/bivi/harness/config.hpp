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

#ifndef BIVI_HARNESS_CONFIG_HPP_
#define BIVI_HARNESS_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bivi/diagnostics.hpp"
#include "bivi/problem.hpp"
#include "bivi/schedule.hpp"
#include "bivi/solver.hpp"

namespace bivi {

struct ProblemSelector {
  std::string type = "example1";  // example1 | example2 | example3 | toy | file
  int m = 100;
  std::uint64_t seed = 1;
  std::string network;  // example3; empty means the shipped file
  std::string path;     // file
};

struct GapSettings {
  std::optional<GapMethod> method;  // none when absent
  long stride = 1;
  int samples = 1000;
};

/// One experiment. Parsed from JSON of the form
///
///   {"name": "...",
///    "problem": {"type": "example2", "m": 100, "seed": 3},
///    "schedule": {"eta":    {"rule": "Constant", "eta": 0.1},
///                 "alpha":  {"rule": "AdaptivePen", "m": 1, "theta": 0.1,
///                            "rho": 1e-4, "alpha0": 0.5},
///                 "lambda": {"rule": "Constant", "lambda": 1.0},
///                 "strong_mode": false},
///    "stop": {"max_iters": 5000, "tol_known_solution": 1e-6},
///    "check_level": "sampled", "record_stride": 1, "seed": 1,
///    "gap": {"method": "exact-affine", "stride": 1},
///    "output": "runs/ex1"}
///
/// The lambda rule also accepts {"rule": "InverseLipschitz", "factor": c}
/// for lambda = c / (L_F + eta0 L_H).
struct RunConfig {
  std::string name = "run";
  ProblemSelector problem;
  ScheduleConfig schedule;
  std::optional<double> lambda_factor;
  StoppingRule stop;
  CheckLevel check = CheckLevel::kOff;
  long record_stride = 1;
  std::uint64_t seed = 1;
  GapSettings gap;
  std::string output;
  nlohmann::json source;  // the JSON this was parsed from
};

RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json load_json_file(const std::string& path);

/// JSON merge patch of `patch` into `base`, except that a schedule rule
/// object carrying a "rule" key replaces the base rule as a whole, so a
/// patch never mixes the parameters of two rules.
nlohmann::json merge_config(nlohmann::json base, const nlohmann::json& patch);

/// Built-in parameter sets: example1, example2, example3.
nlohmann::json preset_json(std::string_view name);
std::vector<std::string> preset_names();

BilevelProblem build_problem(const ProblemSelector& selector);

/// Validates the schedule against the problem constants (ConfigError on
/// failure) and resolves InverseLipschitz stepsizes.
Schedule build_schedule(const RunConfig& config, const BilevelProblem& problem);

/// Affine problem from a definition file:
///   {"name", "F": {"A": [[..]], "b": [..], "mu"?}, "H": {...},
///    "X": {"type": "box", "lo", "hi"} | {"type": "orthant", "n"} |
///         {"type": "polyhedron", "E", "f", "nonneg"} |
///         {"type": "whole_space", "n"} | {"type": "singleton", "point"},
///    "Omega"?: set, "x0", "D_X"?, "C_H"?, "B_H"? (number or "unknown"),
///    "known_solution"?, "sharpness"?: {"sigma", "M"}}
/// Matrices are row-major arrays of rows.
BilevelProblem problem_from_json(const nlohmann::json& j);

}  // namespace bivi

#endif  // BIVI_HARNESS_CONFIG_HPP_
