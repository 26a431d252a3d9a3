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

#include "bivi/harness/config.hpp"

#include <fstream>
#include <set>
#include <string>

#include "bivi/problems.hpp"
#include "bivi/traffic.hpp"

namespace bivi {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

std::string rule_of(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("rule")) {
    throw ConfigError(where + " needs a \"rule\"");
  }
  return j.at("rule").get<std::string>();
}

EtaRule parse_eta(const json& j) {
  const std::string rule = rule_of(j, "schedule.eta");
  if (rule == "Constant") {
    reject_unknown(j, {"rule", "eta"}, "schedule.eta");
    return EtaConstant{j.at("eta").get<double>()};
  }
  if (rule == "Diminishing") {
    reject_unknown(j, {"rule", "eta0", "b"}, "schedule.eta");
    return EtaDiminishing{j.at("eta0").get<double>(), j.at("b").get<double>()};
  }
  throw ConfigError("unknown eta rule '" + rule + "'");
}

AlphaRule parse_alpha(const json& j) {
  const std::string rule = rule_of(j, "schedule.alpha");
  if (rule == "Zero") {
    reject_unknown(j, {"rule"}, "schedule.alpha");
    return AlphaZero{};
  }
  if (rule == "Constant") {
    reject_unknown(j, {"rule", "alpha"}, "schedule.alpha");
    return AlphaConstant{j.at("alpha").get<double>()};
  }
  if (rule == "AdaptivePen") {
    reject_unknown(j, {"rule", "m", "theta", "rho", "alpha0"}, "schedule.alpha");
    return AlphaAdaptivePen{j.at("m").get<long>(), j.at("theta").get<double>(),
                            j.at("rho").get<double>(), j.at("alpha0").get<double>()};
  }
  if (rule == "SummableTail") {
    reject_unknown(j, {"rule", "m", "xi0", "power"}, "schedule.alpha");
    return AlphaSummableTail{j.at("m").get<long>(), j.at("xi0").get<double>(),
                             j.at("power").get<double>()};
  }
  throw ConfigError("unknown alpha rule '" + rule + "'");
}

void parse_lambda(const json& j, RunConfig& cfg) {
  const std::string rule = rule_of(j, "schedule.lambda");
  if (rule == "Constant") {
    reject_unknown(j, {"rule", "lambda"}, "schedule.lambda");
    cfg.schedule.lambda = LambdaConstant{j.at("lambda").get<double>()};
  } else if (rule == "Interval") {
    reject_unknown(j, {"rule", "lo", "hi"}, "schedule.lambda");
    cfg.schedule.lambda = LambdaInterval{j.at("lo").get<double>(), j.at("hi").get<double>()};
  } else if (rule == "InverseLipschitz") {
    reject_unknown(j, {"rule", "factor"}, "schedule.lambda");
    cfg.lambda_factor = j.value("factor", 1.0);
    if (!(*cfg.lambda_factor > 0.0)) throw ConfigError("lambda factor must be > 0");
  } else {
    throw ConfigError("unknown lambda rule '" + rule + "'");
  }
}

Vector to_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array");
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

Matrix to_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ConfigError(what + " must be a nonempty array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Index>(j[r].size()) != cols) {
      throw ConfigError(what + " row " + std::to_string(r) + " has the wrong length");
    }
    for (Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

SimpleSet parse_set(const json& j, const std::string& what) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "box") return SimpleSet::box(to_vector(j.at("lo"), what + ".lo"), to_vector(j.at("hi"), what + ".hi"));
  if (type == "orthant") return SimpleSet::orthant(j.at("n").get<Index>());
  if (type == "whole_space") return SimpleSet::whole_space(j.at("n").get<Index>());
  if (type == "singleton") return SimpleSet::singleton(to_vector(j.at("point"), what + ".point"));
  if (type == "polyhedron") {
    std::optional<Vector> fp;
    if (j.contains("feasible_point")) fp = to_vector(j["feasible_point"], what + ".feasible_point");
    return SimpleSet::polyhedron(to_matrix(j.at("E"), what + ".E"), to_vector(j.at("f"), what + ".f"),
                                 j.value("nonneg", false), {}, fp);
  }
  throw ConfigError("unknown set type '" + type + "' in " + what);
}

Operator parse_operator(const json& j, const std::string& what) {
  const std::string kind = j.value("kind", std::string("affine"));
  if (kind != "affine") throw ConfigError(what + ": only affine operators can be read from files");
  Matrix a = to_matrix(j.at("A"), what + ".A");
  Vector b = j.contains("b") ? to_vector(j["b"], what + ".b") : Vector::Zero(a.rows());
  if (j.contains("mu")) return Operator::affine(std::move(a), std::move(b), j["mu"].get<double>());
  return Operator::affine(std::move(a), std::move(b));
}

Constant parse_constant(const json& j, const char* key) {
  if (!j.contains(key)) return Constant::unavailable();
  const auto& v = j[key];
  if (v.is_number()) return Constant::supplied(v.get<double>());
  const std::string s = v.get<std::string>();
  if (s == "unknown" || s == "unbounded") return Constant::unavailable();
  throw ConfigError(std::string(key) + " must be a number, \"unknown\" or \"unbounded\"");
}

}  // namespace

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

RunConfig parse_run_config(const nlohmann::json& j) {
  RunConfig cfg;
  cfg.source = j;
  try {
    reject_unknown(j, {"name", "problem", "schedule", "stop", "check_level", "record_stride",
                       "seed", "gap", "output", "description"},
                   "run config");
    cfg.name = j.value("name", std::string("run"));

    const json& p = j.at("problem");
    reject_unknown(p, {"type", "m", "seed", "network", "path"}, "problem");
    cfg.problem.type = p.at("type").get<std::string>();
    cfg.problem.m = p.value("m", 100);
    cfg.problem.seed = p.value("seed", std::uint64_t{1});
    cfg.problem.network = p.value("network", std::string());
    cfg.problem.path = p.value("path", std::string());

    const json& s = j.at("schedule");
    reject_unknown(s, {"eta", "alpha", "lambda", "strong_mode"}, "schedule");
    cfg.schedule.eta = parse_eta(s.at("eta"));
    cfg.schedule.alpha = s.contains("alpha") ? parse_alpha(s["alpha"]) : AlphaRule{AlphaZero{}};
    if (s.contains("lambda") && !s["lambda"].is_null()) parse_lambda(s["lambda"], cfg);
    cfg.schedule.strong_mode = s.value("strong_mode", false);

    const json& st = j.at("stop");
    reject_unknown(st, {"max_iters", "tol_step", "tol_ergodic", "tol_known_solution"}, "stop");
    if (st.contains("max_iters")) cfg.stop.max_iters = st["max_iters"].get<long>();
    if (st.contains("tol_step")) cfg.stop.tol_step = st["tol_step"].get<double>();
    if (st.contains("tol_ergodic")) cfg.stop.tol_ergodic = st["tol_ergodic"].get<double>();
    if (st.contains("tol_known_solution")) {
      cfg.stop.tol_known_solution = st["tol_known_solution"].get<double>();
    }
    cfg.stop.validate();

    cfg.check = parse_check_level(j.value("check_level", std::string("off")));
    cfg.record_stride = j.value("record_stride", 1L);
    if (cfg.record_stride < 1) throw ConfigError("record_stride must be >= 1");
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.output = j.value("output", std::string());

    if (j.contains("gap")) {
      const json& g = j["gap"];
      reject_unknown(g, {"method", "stride", "samples"}, "gap");
      const std::string m = g.value("method", std::string("none"));
      if (m != "none") cfg.gap.method = parse_gap_method(m);
      cfg.gap.stride = g.value("stride", 1L);
      cfg.gap.samples = g.value("samples", 1000);
      if (cfg.gap.stride < 1 || cfg.gap.samples < 1) {
        throw ConfigError("gap stride and samples must be >= 1");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  return cfg;
}

std::vector<std::string> preset_names() { return {"example1", "example2", "example3"}; }

nlohmann::json merge_config(nlohmann::json base, const nlohmann::json& patch) {
  if (patch.is_object() && base.is_object() && patch.contains("schedule") &&
      patch["schedule"].is_object() && base.contains("schedule") && base["schedule"].is_object()) {
    for (const char* key : {"eta", "alpha", "lambda"}) {
      const auto it = patch["schedule"].find(key);
      if (it != patch["schedule"].end() && it->is_object() && it->contains("rule")) {
        base["schedule"].erase(key);
      }
    }
  }
  base.merge_patch(patch);
  return base;
}

nlohmann::json preset_json(std::string_view name) {
  if (name == "example1") {
    return json{
        {"name", "example1"},
        {"problem", {{"type", "example1"}}},
        {"schedule",
         {{"eta", {{"rule", "Constant"}, {"eta", 0.1}}},
          {"alpha", {{"rule", "Constant"}, {"alpha", 0.5}}},
          {"lambda", {{"rule", "Constant"}, {"lambda", 1.0}}},
          {"strong_mode", false}}},
        {"stop", {{"max_iters", 5000}}},
        {"check_level", "sampled"},
        {"record_stride", 1},
        {"seed", 1},
        {"gap", {{"method", "exact-affine"}, {"stride", 1}}}};
  }
  if (name == "example2") {
    return json{
        {"name", "example2"},
        {"problem", {{"type", "example2"}, {"m", 100}, {"seed", 1}}},
        {"schedule",
         {{"eta", {{"rule", "Constant"}, {"eta", 0.1}}},
          {"alpha", {{"rule", "Constant"}, {"alpha", 0.1}}},
          {"lambda", {{"rule", "InverseLipschitz"}, {"factor", 1.0}}},
          {"strong_mode", false}}},
        {"stop", {{"max_iters", 2000}}},
        {"check_level", "off"},
        {"record_stride", 1},
        {"seed", 1}};
  }
  if (name == "example3") {
    return json{
        {"name", "example3"},
        {"problem", {{"type", "example3"}}},
        {"schedule",
         {{"eta", {{"rule", "Constant"}, {"eta", 0.1}}},
          {"alpha", {{"rule", "Constant"}, {"alpha", 0.5}}},
          {"lambda", {{"rule", "Constant"}, {"lambda", 0.1}}},
          {"strong_mode", false}}},
        {"stop", {{"max_iters", 5000}}},
        {"check_level", "off"},
        {"record_stride", 1},
        {"seed", 1}};
  }
  throw ConfigError("unknown preset '" + std::string(name) +
                    "' (expected example1, example2 or example3)");
}

BilevelProblem build_problem(const ProblemSelector& sel) {
  if (sel.type == "example1") return make_example1();
  if (sel.type == "example2") return make_example2(sel.m, sel.seed);
  if (sel.type == "example3") {
    return make_example3(load_network(sel.network.empty() ? default_network_path() : sel.network));
  }
  if (sel.type == "toy") return make_toy_interval();
  if (sel.type == "file") {
    if (sel.path.empty()) throw ConfigError("problem type 'file' needs a path");
    return problem_from_json(load_json_file(sel.path));
  }
  throw ConfigError("unknown problem type '" + sel.type + "'");
}

Schedule build_schedule(const RunConfig& cfg, const BilevelProblem& problem) {
  ScheduleConfig sc = cfg.schedule;
  if (cfg.lambda_factor) {
    const double l0 = problem.l_f() + initial_eta(sc.eta) * problem.l_h();
    if (!(l0 > 0.0)) throw ConfigError("InverseLipschitz stepsize needs L_F + eta0 L_H > 0");
    sc.lambda = LambdaConstant{*cfg.lambda_factor / l0};
  }
  try {
    return Schedule(std::move(sc), problem.l_f(), problem.l_h(), problem.mu());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
}

BilevelProblem problem_from_json(const nlohmann::json& j) {
  try {
    reject_unknown(j, {"name", "F", "H", "X", "Omega", "x0", "D_X", "C_H", "B_H",
                       "known_solution", "sharpness", "notes", "sample_radius"},
                   "problem file");
    ProblemSpec spec{
        .name = j.value("name", std::string("file")),
        .f = parse_operator(j.at("F"), "F"),
        .h = parse_operator(j.at("H"), "H"),
        .x = parse_set(j.at("X"), "X"),
        .omega = j.contains("Omega") ? std::optional<SimpleSet>(parse_set(j["Omega"], "Omega"))
                                     : std::nullopt,
        .initial_point = to_vector(j.at("x0"), "x0"),
        .d_x = parse_constant(j, "D_X"),
        .c_h = parse_constant(j, "C_H"),
        .b_h = parse_constant(j, "B_H"),
        .known_solution = j.contains("known_solution")
                              ? std::optional<Vector>(to_vector(j["known_solution"], "known_solution"))
                              : std::nullopt,
        .sharpness = std::nullopt,
        .notes = j.value("notes", std::vector<std::string>{}),
        .sample_radius = j.value("sample_radius", 10.0),
    };
    if (j.contains("sharpness")) {
      spec.sharpness = Sharpness{j["sharpness"].at("sigma").get<double>(),
                                 j["sharpness"].at("M").get<double>()};
    }
    const bool want_dx = !j.contains("D_X");
    const bool want_ch = !j.contains("C_H");
    if ((want_dx || want_ch) && spec.x.is_bounded()) {
      BilevelProblem probe(spec);
      const ConstantEstimate est = estimate_constants(probe, 256);
      if (want_dx) spec.d_x = est.d_x;
      if (want_ch) spec.c_h = est.c_h;
    }
    return BilevelProblem(std::move(spec));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("problem file: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("problem file: ") + e.what());
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("problem file: ") + e.what());
  }
}

}  // namespace bivi
