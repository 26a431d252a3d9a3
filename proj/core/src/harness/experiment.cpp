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

#include "bivi/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include "bivi/diagnostics.hpp"

namespace bivi {
namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr Index kMaxVectorColumns = 10;
constexpr double kGapSignTol = 1e-9;

// A bound column: which measured column it dominates and how to evaluate it.
struct BoundColumn {
  BoundName name;
  std::string measured;
  bool certified = false;
  std::string column() const { return "ub_" + measured + "_by_" + std::string(to_string(name)); }
};

struct BoundStat {
  long checks = 0;
  long violations = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  long first_violation = -1;
};

json constant_json(const Constant& c) {
  json j;
  j["value"] = c.value ? json(*c.value) : json(nullptr);
  j["provenance"] = std::string(to_string(c.source));
  return j;
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

class Recorder {
 public:
  Recorder(const RunConfig& cfg, const BilevelProblem& problem, const Schedule& schedule)
      : cfg_(cfg), problem_(problem), schedule_(schedule) {
    const Index n = problem.dim();
    vectors_ = n <= kMaxVectorColumns;
    strong_ = schedule.strong_mode();
    known_ = problem.known_solution().has_value();
    gap_ = cfg.gap.method.has_value();

    add("k");
    if (vectors_) {
      for (Index i = 0; i < n; ++i) add("x_" + std::to_string(i));
      for (Index i = 0; i < n; ++i) add("ybar_" + std::to_string(i));
      if (strong_) {
        for (Index i = 0; i < n; ++i) add("ybarw_" + std::to_string(i));
      }
    }
    for (const char* c : {"step_norm", "delta", "alpha", "eta", "lambda"}) add(c);
    if (strong_) {
      add("beta");
      add("log_p");
    }
    for (const char* c : {"s_partial", "shat_partial", "sum_pdelta", "D_k", "phi"}) add(c);
    if (known_) add("err_x");
    if (gap_) add("gap_fx");
    if (known_) add("gap_hq_surr");
    if (strong_) {
      if (gap_) add("gap_fx_w");
      if (known_) add("gap_hq_surr_w");
    }
    plan_bounds();
    for (const auto& b : bounds_) add(b.column());
    if (cfg.check != CheckLevel::kOff) {
      add("inv_descent");
      add("inv_identity");
      if (strong_) add("inv_strong");
    }
    table_ = RecordTable(columns_);
    table_.set_run_id(cfg.name);
  }

  void observe(const SolverState& st, const IterationTrace& tr, const InvariantMonitor& mon) {
    const Vector ybar = st.plain.value();
    if (pending_) {
      (*pending_)[col("D_k")] = (ybar - prev_ybar_).norm();
      flush();
    }
    prev_ybar_ = ybar;
    last_trace_ = tr;
    if (st.k % cfg_.record_stride == 0) build_row(st, tr, &mon, ybar);
  }

  // Puts the final iterate on record when the stride skipped it, then
  // flushes. The monitor is gone by then, so that row has no residuals.
  void finish(const SolverState& st) {
    if (st.k >= 1 && last_recorded_ != st.k && last_trace_) {
      if (pending_) flush();
      build_row(st, *last_trace_, nullptr, st.plain.value());
    }
    if (pending_) flush();
  }

  RecordTable& table() { return table_; }
  const std::vector<BoundColumn>& bounds() const { return bounds_; }
  const std::map<std::string, BoundStat>& bound_stats() const { return bound_stats_; }
  const json& skipped() const { return skipped_; }
  long gap_sign_violations() const { return gap_sign_violations_; }
  long gap_unavailable() const { return gap_unavailable_; }
  bool gap_lower_bound() const { return gap_lower_bound_; }
  double last_d() const { return last_d_; }

 private:
  void add(const std::string& c) {
    index_[c] = columns_.size();
    columns_.push_back(c);
  }
  std::size_t col(const std::string& c) const { return index_.at(c); }
  bool has(const std::string& c) const { return index_.count(c) > 0; }

  void skip(BoundName name, const std::string& reason) {
    skipped_.push_back({{"bound", std::string(to_string(name))}, {"reason", reason}});
  }

  void plan_bounds() {
    const bool dx = problem_.d_x().known();
    const bool ch = problem_.c_h().known();
    const bool dx_cert = problem_.d_x().certified();
    const bool ch_cert = problem_.c_h().certified();
    const bool flag = schedule_.alpha_over_eta_nonincreasing();
    const bool constant = schedule_.constant_eta();

    const BoundName opt = constant ? BoundName::kOptimalityConstant : BoundName::kOptimalityDiminishing;
    const BoundName feas = constant ? BoundName::kFeasibilityConstant : BoundName::kFeasibilityDiminishing;
    const std::string no_dx = "D_X unavailable (X unbounded or diameter unknown)";
    const std::string no_flag = "alpha_k/eta_k is not certified nonincreasing for this schedule";

    if (!dx) {
      skip(opt, no_dx);
      skip(feas, no_dx);
    } else if (!flag) {
      skip(opt, no_flag);
      skip(feas, no_flag);
    } else {
      if (known_) {
        bounds_.push_back({opt, "gap_hq_surr", dx_cert});
      } else {
        skip(opt, "no known solution, so no measured surrogate to compare against");
      }
      if (!ch) {
        skip(feas, "C_H unavailable");
      } else if (gap_) {
        bounds_.push_back({feas, "gap_fx", dx_cert && ch_cert});
      } else {
        skip(feas, "gap_FX is not measured in this run");
      }
    }

    if (!strong_) return;
    if (!constant) {
      for (BoundName b : {BoundName::kStrongOptimality, BoundName::kStrongFeasibility}) {
        skip(b, "strong-mode bounds need a constant eta");
      }
      return;
    }
    if (!dx) {
      for (BoundName b : {BoundName::kStrongOptimality, BoundName::kStrongFeasibility}) {
        skip(b, no_dx);
      }
      return;
    }
    beta_bar_ = schedule_.beta_bar();
    if (known_) {
      bounds_.push_back({BoundName::kStrongOptimality, "gap_hq_surr_w", dx_cert});
      if (schedule_.inertia_free()) {
        bounds_.push_back({BoundName::kStrongOptimalityNoInertia, "gap_hq_surr_w", dx_cert});
      }
      bounds_.push_back({BoundName::kStrongOptimalityClosed, "gap_hq_surr_w", dx_cert});
    } else {
      skip(BoundName::kStrongOptimality, "no known solution");
    }
    if (ch && gap_) {
      bounds_.push_back({BoundName::kStrongFeasibility, "gap_fx_w", dx_cert && ch_cert});
      bounds_.push_back({BoundName::kStrongFeasibilityClosed, "gap_fx_w", dx_cert && ch_cert});
    } else {
      skip(BoundName::kStrongFeasibility, ch ? "gap_FX is not measured" : "C_H unavailable");
    }
  }

  double measure_gap(const Vector& z, long k) {
    GapOptions opts;
    opts.samples = cfg_.gap.samples;
    opts.seed = cfg_.seed + 11;
    try {
      const GapResult g = gap_fx(z, problem_, *cfg_.gap.method, opts);
      if (g.lower_bound) gap_lower_bound_ = true;
      if (g.value < -kGapSignTol) {
        ++gap_sign_violations_;
        if (first_gap_sign_ < 0) first_gap_sign_ = k;
      }
      return g.value;
    } catch (const DomainError&) {
      ++gap_unavailable_;
    } catch (const UnavailableError&) {
      ++gap_unavailable_;
    }
    return kNaN;
  }

  double bound_value(BoundName name, long k, const ScheduleState& sc) const {
    BoundConstants c;
    c.d_x = *problem_.d_x().value;
    c.lambda_lo = schedule_.lambda_lo();
    c.lambda_hi = schedule_.lambda_hi();
    c.eta = schedule_.eta0();
    if (const auto* d = std::get_if<EtaDiminishing>(&schedule_.config().eta)) c.b = d->b;
    c.c_h = problem_.c_h().value.value_or(0.0);
    switch (name) {
      case BoundName::kOptimalityDiminishing:
        return bound_optimality_diminishing(k, c, sc.s.value());
      case BoundName::kFeasibilityDiminishing:
        return bound_feasibility_diminishing(k, c, sc.s.value());
      case BoundName::kOptimalityConstant:
        return bound_optimality_constant(k, c, sc.shat.value());
      case BoundName::kFeasibilityConstant:
        return bound_feasibility_constant(k, c, sc.shat.value());
      case BoundName::kStrongOptimality:
        return strong_bound_optimality(k, c, *beta_bar_, sc.sum_pdelta.value());
      case BoundName::kStrongOptimalityNoInertia:
        return strong_bound_optimality_no_inertia(k, c, *beta_bar_);
      case BoundName::kStrongOptimalityClosed:
        return strong_bound_optimality_closed(k, c, *beta_bar_);
      case BoundName::kStrongFeasibility:
        return strong_bound_feasibility(k, c, *beta_bar_, sc.sum_pdelta.value());
      case BoundName::kStrongFeasibilityClosed:
        return strong_bound_feasibility_closed(k, c, *beta_bar_);
    }
    return kNaN;
  }

  void build_row(const SolverState& st, const IterationTrace& tr, const InvariantMonitor* mon,
                 const Vector& ybar) {
    std::vector<double> row(columns_.size(), kNaN);
    const long k = st.k;
    const ScheduleState& sc = st.schedule;
    const Index n = problem_.dim();
    row[col("k")] = static_cast<double>(k);
    std::optional<Vector> ybarw;
    if (strong_) ybarw = st.weighted.value();
    if (vectors_) {
      for (Index i = 0; i < n; ++i) {
        row[col("x_" + std::to_string(i))] = st.x[i];
        row[col("ybar_" + std::to_string(i))] = ybar[i];
        if (ybarw) row[col("ybarw_" + std::to_string(i))] = (*ybarw)[i];
      }
    }
    row[col("step_norm")] = tr.step_norm;
    row[col("delta")] = sc.delta;
    row[col("alpha")] = sc.alpha;
    row[col("eta")] = sc.eta;
    row[col("lambda")] = sc.lambda;
    if (strong_) {
      row[col("beta")] = sc.beta;
      row[col("log_p")] = sc.log_p;
    }
    row[col("s_partial")] = sc.s.value();
    row[col("shat_partial")] = sc.shat.value();
    row[col("sum_pdelta")] = sc.sum_pdelta.value();
    row[col("phi")] = infeasibility_phi(ybar, problem_.f());
    if (known_) {
      row[col("err_x")] = (st.x - *problem_.known_solution()).norm();
      row[col("gap_hq_surr")] = gap_hq_surrogate(ybar, problem_);
      if (ybarw) row[col("gap_hq_surr_w")] = gap_hq_surrogate(*ybarw, problem_);
    }
    if (gap_ && k % cfg_.gap.stride == 0) {
      row[col("gap_fx")] = measure_gap(ybar, k);
      if (ybarw) row[col("gap_fx_w")] = measure_gap(*ybarw, k);
    }
    for (const auto& b : bounds_) {
      const double ub = bound_value(b.name, k, sc);
      const std::string name = b.column();
      row[col(name)] = ub;
      const double m = row[col(b.measured)];
      if (std::isnan(m)) continue;
      BoundStat& s = bound_stats_[name];
      ++s.checks;
      s.min_slack = std::min(s.min_slack, ub - m);
      if (!(m <= ub + 1e-6)) {
        ++s.violations;
        if (s.first_violation < 0) s.first_violation = k;
      }
    }
    if (mon && mon->level() != CheckLevel::kOff) {
      row[col("inv_descent")] = mon->last().descent;
      row[col("inv_identity")] = mon->last().identity;
      if (strong_) row[col("inv_strong")] = mon->last().strong;
    }
    pending_ = std::move(row);
    last_recorded_ = k;
  }

  void flush() {
    const double d = (*pending_)[col("D_k")];
    if (!std::isnan(d)) last_d_ = d;
    table_.add_row(std::move(*pending_));
    pending_.reset();
  }

  const RunConfig& cfg_;
  const BilevelProblem& problem_;
  const Schedule& schedule_;
  bool vectors_ = false;
  bool strong_ = false;
  bool known_ = false;
  bool gap_ = false;
  std::optional<double> beta_bar_;
  std::vector<std::string> columns_;
  std::map<std::string, std::size_t> index_;
  std::vector<BoundColumn> bounds_;
  json skipped_ = json::array();
  std::map<std::string, BoundStat> bound_stats_;
  RecordTable table_;
  std::optional<std::vector<double>> pending_;
  Vector prev_ybar_;
  long last_recorded_ = -1;
  std::optional<IterationTrace> last_trace_;
  long gap_sign_violations_ = 0;
  long first_gap_sign_ = -1;
  long gap_unavailable_ = 0;
  bool gap_lower_bound_ = false;
  double last_d_ = kNaN;
};

json invariants_json(const InvariantReport& rep, CheckLevel level) {
  json checks = json::array();
  for (const auto& s : rep.stats) {
    checks.push_back({{"name", s.name},
                      {"checks", s.checks},
                      {"violations", s.violations},
                      {"worst_slack", finite_or_null(s.worst_slack)},
                      {"first_violation", s.first_violation >= 0 ? json(s.first_violation) : json(nullptr)}});
  }
  return {{"level", std::string(to_string(level))},
          {"ok", rep.ok()},
          {"total_violations", rep.total_violations()},
          {"checks", checks}};
}

}  // namespace

RunOutcome run_experiment(const RunConfig& cfg, const std::string& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  BilevelProblem problem = build_problem(cfg.problem);
  Schedule schedule = build_schedule(cfg, problem);
  if (cfg.stop.tol_known_solution && !problem.known_solution()) {
    throw ConfigError("tol_known_solution needs a problem with a known solution");
  }
  if (cfg.gap.method == GapMethod::kExactAffine && !problem.f().is_affine()) {
    throw ConfigError("exact-affine gap needs an affine lower-level operator");
  }

  Recorder rec(cfg, problem, schedule);
  RunOptions opts{cfg.check, cfg.seed};
  RunResult result = run(problem, schedule, cfg.stop, opts,
                         [&](const SolverState& st, const IterationTrace& tr,
                             const InvariantMonitor& mon) { rec.observe(st, tr, mon); });
  rec.finish(result.state);

  RunOutcome out;
  out.reason = result.reason;
  out.iterations = result.state.k;
  out.invariants_ok = result.invariants.ok() && rec.gap_sign_violations() == 0;

  json bounds_json = json::object();
  long certified_violations = 0;
  long uncertified_violations = 0;
  json emitted = json::array();
  for (const auto& b : rec.bounds()) {
    const std::string name = b.column();
    const auto it = rec.bound_stats().find(name);
    const BoundStat s = it == rec.bound_stats().end() ? BoundStat{} : it->second;
    (b.certified ? certified_violations : uncertified_violations) += s.violations;
    emitted.push_back({{"column", name},
                       {"bound", std::string(to_string(b.name))},
                       {"measured", b.measured},
                       {"certified", b.certified},
                       {"checks", s.checks},
                       {"violations", s.violations},
                       {"min_slack", finite_or_null(s.min_slack)},
                       {"first_violation", s.first_violation >= 0 ? json(s.first_violation) : json(nullptr)}});
  }
  out.bounds_ok = certified_violations == 0;
  bounds_json["emitted"] = emitted;
  bounds_json["skipped"] = rec.skipped();
  bounds_json["certified_violations"] = certified_violations;
  bounds_json["uncertified_violations"] = uncertified_violations;
  bounds_json["ok"] = out.bounds_ok;

  if (result.reason == StopReason::kDiverged) {
    out.exit_code = kExitDivergence;
  } else if (!out.invariants_ok || !out.bounds_ok) {
    out.exit_code = kExitInvariant;
  }

  const SolverState& st = result.state;
  json final_json;
  final_json["x"] = vector_json(st.x);
  final_json["step_norm"] = st.k >= 1 ? json(st.last_step_norm) : json(nullptr);
  if (st.k >= 1) {
    const Vector ybar = st.plain.value();
    final_json["ybar"] = vector_json(ybar);
    final_json["phi"] = finite_or_null(infeasibility_phi(ybar, problem.f()));
    final_json["D_k"] = finite_or_null(rec.last_d());
  }
  if (problem.known_solution()) {
    final_json["err_x"] = (st.x - *problem.known_solution()).norm();
  }

  Constant b_h = problem.b_h();
  if (!b_h.known() && problem.known_solution()) {
    b_h = Constant::point_estimate(problem.h()(*problem.known_solution()).norm());
  }

  json constants = {
      {"L_F", problem.l_f()},
      {"L_H", problem.l_h()},
      {"mu_H", problem.mu()},
      {"D_X", constant_json(problem.d_x())},
      {"C_H", constant_json(problem.c_h())},
      {"B_H", constant_json(b_h)},
  };

  const ScheduleState& sc = st.schedule;
  json sched = {
      {"eta_rule", std::string(rule_name(schedule.config().eta))},
      {"alpha_rule", std::string(rule_name(schedule.config().alpha))},
      {"lambda_rule", std::string(rule_name(schedule.lambda_rule()))},
      {"lambda_lo", schedule.lambda_lo()},
      {"lambda_hi", schedule.lambda_hi()},
      {"eta0", schedule.eta0()},
      {"strong_mode", schedule.strong_mode()},
      {"alpha_over_eta_nonincreasing", schedule.alpha_over_eta_nonincreasing()},
      {"max_ratio_increase", sc.max_ratio_increase},
      {"s_partial", sc.s.value()},
      {"shat_partial", sc.shat.value()},
      {"sum_pdelta", sc.sum_pdelta.value()},
  };
  if (schedule.strong_mode() && schedule.constant_eta()) sched["beta_bar"] = schedule.beta_bar();

  json gap = json::object();
  gap["method"] = cfg.gap.method ? json(std::string(to_string(*cfg.gap.method))) : json("none");
  gap["stride"] = cfg.gap.stride;
  gap["lower_bound_only"] = rec.gap_lower_bound();
  gap["sign_violations"] = rec.gap_sign_violations();
  gap["unavailable_evaluations"] = rec.gap_unavailable();

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.summary = {
      {"run_id", cfg.name},
      {"problem", problem.name()},
      {"dim", problem.dim()},
      {"stop_reason", std::string(to_string(result.reason))},
      {"iterations", st.k},
      {"exit_code", out.exit_code},
      {"final", final_json},
      {"constants", constants},
      {"schedule", sched},
      {"invariants", invariants_json(result.invariants, cfg.check)},
      {"bounds", bounds_json},
      {"gap", gap},
      {"notes", problem.notes()},
      {"wall_time_s", wall},
  };
  if (result.reason == StopReason::kDiverged) {
    out.summary["divergence"] = result.divergence_message;
  }

  out.records = std::move(rec.table());

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    out.records.write_csv((dir / "records.csv").string());
    write_text(dir / "summary.json", out.summary.dump(2) + "\n");
    json echo = cfg.source;
    echo["resolved"] = {{"lambda_lo", schedule.lambda_lo()},
                        {"lambda_hi", schedule.lambda_hi()},
                        {"L_F", problem.l_f()},
                        {"L_H", problem.l_h()},
                        {"mu_H", problem.mu()}};
    write_text(dir / "config.json", echo.dump(2) + "\n");
  }
  return out;
}

std::vector<SweepVariant> parse_grid(const nlohmann::json& grid) {
  if (!grid.is_object() || !grid.contains("variants") || !grid["variants"].is_array()) {
    throw ConfigError("grid needs a \"variants\" array");
  }
  std::vector<SweepVariant> out;
  std::set<std::string> seen;
  for (const auto& v : grid["variants"]) {
    if (!v.is_object() || !v.contains("name") || !v["name"].is_string()) {
      throw ConfigError("every grid variant needs a \"name\"");
    }
    SweepVariant sv{v["name"].get<std::string>(), v.value("patch", json::object())};
    if (sv.name.empty() || sv.name.find_first_of("/\\,.") != std::string::npos) {
      throw ConfigError("variant name '" + sv.name + "' must be nonempty without / \\ , or .");
    }
    if (!seen.insert(sv.name).second) throw ConfigError("duplicate variant '" + sv.name + "'");
    out.push_back(std::move(sv));
  }
  if (out.size() < 2) throw ConfigError("a sweep needs at least two variants");
  return out;
}

SweepOutcome run_sweep(const nlohmann::json& base, const std::vector<SweepVariant>& variants,
                       const std::string& out_dir, unsigned threads) {
  if (variants.size() < 2) throw ConfigError("a sweep needs at least two variants");
  const std::size_t n = variants.size();
  std::vector<std::optional<RecordTable>> tables(n);
  SweepOutcome out;
  out.exit_codes.assign(n, kExitOk);
  out.errors.assign(n, {});
  std::vector<json> summaries(n);
  for (const auto& v : variants) out.names.push_back(v.name);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        json cfg_json = merge_config(base, variants[i].patch);
        cfg_json["name"] = variants[i].name;
        RunConfig cfg = parse_run_config(cfg_json);
        const std::string dir =
            out_dir.empty() ? std::string() : (std::filesystem::path(out_dir) / variants[i].name).string();
        RunOutcome r = run_experiment(cfg, dir);
        out.exit_codes[i] = r.exit_code;
        summaries[i] = r.summary;
        tables[i] = std::move(r.records);
      } catch (const ConfigError& e) {
        out.exit_codes[i] = kExitConfig;
        out.errors[i] = e.what();
      } catch (const std::exception& e) {
        out.exit_codes[i] = kExitConfig;
        out.errors[i] = e.what();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // Assemble after all joins.
  std::set<long> ks;
  for (const auto& t : tables) {
    if (!t) continue;
    for (double k : t->column("k")) ks.insert(static_cast<long>(k));
  }
  std::vector<std::string> cols{"k"};
  for (const auto& v : variants) {
    for (const char* m : {".D_k", ".phi", ".err"}) cols.push_back(v.name + m);
  }
  RecordTable compare(cols);
  std::vector<std::map<long, std::size_t>> row_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!tables[i]) continue;
    const auto kc = tables[i]->column("k");
    for (std::size_t r = 0; r < kc.size(); ++r) row_of[i][static_cast<long>(kc[r])] = r;
  }
  for (long k : ks) {
    std::vector<double> row{static_cast<double>(k)};
    for (std::size_t i = 0; i < n; ++i) {
      double d = kNaN, phi = kNaN, err = kNaN;
      if (tables[i]) {
        const auto it = row_of[i].find(k);
        if (it != row_of[i].end()) {
          d = tables[i]->at(it->second, "D_k");
          phi = tables[i]->at(it->second, "phi");
          if (tables[i]->index_of("err_x")) err = tables[i]->at(it->second, "err_x");
        }
      }
      row.push_back(d);
      row.push_back(phi);
      row.push_back(err);
    }
    compare.add_row(std::move(row));
  }
  out.compare = std::move(compare);
  out.exit_code = *std::max_element(out.exit_codes.begin(), out.exit_codes.end());

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    out.compare.write_csv((dir / "compare.csv").string());
    json sj = {{"exit_code", out.exit_code}, {"threads", workers}, {"variants", json::array()}};
    for (std::size_t i = 0; i < n; ++i) {
      json v = {{"name", variants[i].name},
                {"patch", variants[i].patch},
                {"exit_code", out.exit_codes[i]},
                {"status", out.errors[i].empty() ? "ran" : "failed"}};
      if (!out.errors[i].empty()) v["error"] = out.errors[i];
      if (!summaries[i].is_null()) {
        v["stop_reason"] = summaries[i]["stop_reason"];
        v["iterations"] = summaries[i]["iterations"];
        v["final"] = summaries[i]["final"];
      }
      sj["variants"].push_back(v);
    }
    write_text(dir / "sweep.json", sj.dump(2) + "\n");
  }
  return out;
}

unsigned thread_budget() {
  if (const char* env = std::getenv("BIVI_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace bivi
