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

// Acceptance runner: one PASS/FAIL line per primary criterion. Exits 1 if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "bivi/diagnostics.hpp"
#include "bivi/harness/config.hpp"
#include "bivi/harness/experiment.hpp"
#include "bivi/problems.hpp"
#include "bivi/schedule.hpp"
#include "bivi/solver.hpp"
#include "bivi/traffic.hpp"
#include "support.hpp"

namespace {

using nlohmann::json;
using namespace bivi;

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Appends a failure note and clears the verdict.
void fail(Verdict& v, const std::string& why) {
  v.pass = false;
  if (!v.detail.empty()) v.detail += "; ";
  v.detail += why;
}

void note(Verdict& v, const std::string& what) {
  if (!v.detail.empty()) v.detail += "; ";
  v.detail += what;
}

json eta_const(double e) { return {{"rule", "Constant"}, {"eta", e}}; }
json eta_dimin(double e0, double b) { return {{"rule", "Diminishing"}, {"eta0", e0}, {"b", b}}; }
json alpha_zero() { return {{"rule", "Zero"}}; }
json alpha_const(double a) { return {{"rule", "Constant"}, {"alpha", a}}; }
json alpha_pen(long m, double theta, double rho, double a0) {
  return {{"rule", "AdaptivePen"}, {"m", m}, {"theta", theta}, {"rho", rho}, {"alpha0", a0}};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double last_finite(const std::vector<double>& v) {
  for (auto it = v.rbegin(); it != v.rend(); ++it) {
    if (std::isfinite(*it)) return *it;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double first_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (std::isfinite(x)) return x;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Example 1 at the stated parameters and the four eta x alpha variants.
Verdict example1_reproduction() {
  Verdict v;
  const RunConfig preset = parse_run_config(preset_json("example1"));
  const BilevelProblem p = build_problem(preset.problem);
  const Vector paper_solution = (Vector(2) << 11.0, 10.0).finished();
  if (!p.known_solution() || (*p.known_solution() - paper_solution).norm() != 0.0) {
    fail(v, "known solution differs from [11, 10]");
  }
  auto t0 = std::chrono::steady_clock::now();
  const RunOutcome r = run_experiment(preset, "");
  const double t = seconds_since(t0);
  const double err = r.summary["final"]["err_x"].get<double>();
  if (!(err <= 1e-6)) fail(v, "preset error " + fmt("%.3e", err));
  if (!(t < 1.0)) fail(v, "preset took " + fmt("%.3f s", t));
  note(v, "preset |x-x*| = " + fmt("%.2e", err) + " in " + fmt("%.3f s", t));

  double worst_err = 0.0;
  double worst_t = 0.0;
  for (const json& eta : {eta_const(0.1), eta_dimin(0.1, 0.5)}) {
    for (const json& alpha : {alpha_const(0.5), alpha_pen(1, 0.1, 1e-4, 0.5)}) {
      json j = preset_json("example1");
      j["schedule"]["eta"] = eta;
      j["schedule"]["alpha"] = alpha;
      const auto s0 = std::chrono::steady_clock::now();
      const RunOutcome rv = run_experiment(parse_run_config(j), "");
      const double tv = seconds_since(s0);
      const double ev = rv.summary["final"]["err_x"].get<double>();
      worst_err = std::max(worst_err, ev);
      worst_t = std::max(worst_t, tv);
      if (!(ev <= 1e-4)) {
        fail(v, std::string(eta["rule"]) + "/" + std::string(alpha["rule"]) + " error " +
                    fmt("%.3e", ev));
      }
      if (!(tv < 1.0)) fail(v, "variant took " + fmt("%.3f s", tv));
      if (rv.exit_code != kExitOk) fail(v, "variant exit code " + std::to_string(rv.exit_code));
    }
  }
  note(v, "4 variants: max error " + fmt("%.2e", worst_err) + ", max time " +
              fmt("%.3f s", worst_t));
  return v;
}

// Largest per-iterate distance between the solver with alpha = 0 and the
// reference iteration in the test support header.
double reduction_gap(const json& j, long iters) {
  const RunConfig cfg = parse_run_config(j);
  const BilevelProblem p = build_problem(cfg.problem);
  const Schedule sched = build_schedule(cfg, p);
  const auto ref = testing::reference_ireg(
      p, iters, [&](long k) { return eta_at(cfg.schedule.eta, k); },
      [&](long k) { return lambda_at(sched.lambda_rule(), k); });
  StoppingRule stop;
  stop.max_iters = iters;
  double worst = 0.0;
  long seen = 0;
  run(p, sched, stop, {}, [&](const SolverState& s, const IterationTrace&, const InvariantMonitor&) {
    worst = std::max(worst, (s.x - ref[s.k]).lpNorm<Eigen::Infinity>());
    ++seen;
  });
  if (seen != iters) return std::numeric_limits<double>::infinity();
  return worst;
}

Verdict noninertial_reduction() {
  Verdict v;
  std::vector<std::pair<std::string, json>> cases;
  for (const json& eta : {eta_const(0.1), eta_dimin(0.1, 0.5)}) {
    json j = preset_json("example1");
    j["schedule"]["eta"] = eta;
    j["schedule"]["alpha"] = alpha_zero();
    cases.emplace_back("example1/" + std::string(eta["rule"]), j);
  }
  json ex2 = preset_json("example2");
  ex2["schedule"]["alpha"] = alpha_zero();
  cases.emplace_back("example2", ex2);
  for (const auto& [name, j] : cases) {
    const double gap = reduction_gap(j, 1000);
    if (!(gap <= 1e-12)) fail(v, name + " differs by " + fmt("%.3e", gap));
    note(v, name + " max diff " + fmt("%.1e", gap));
  }
  return v;
}

Verdict invariant_suite() {
  Verdict v;
  std::vector<std::pair<std::string, json>> cases;
  for (const char* name : {"example1", "example2", "example3"}) {
    json j = preset_json(name);
    cases.emplace_back(name, j);
  }
  json pen = preset_json("example1");
  pen["schedule"]["alpha"] = alpha_pen(1, 0.1, 1e-4, 0.5);
  pen["schedule"]["eta"] = eta_dimin(0.1, 0.5);
  cases.emplace_back("example1/pen+diminishing", pen);
  json strong = preset_json("example1");
  strong["schedule"]["strong_mode"] = true;
  cases.emplace_back("example1/strong", strong);

  for (auto& [name, j] : cases) {
    j["stop"] = {{"max_iters", 2000}};
    const RunConfig cfg = parse_run_config(j);
    const BilevelProblem p = build_problem(cfg.problem);
    const Schedule sched = build_schedule(cfg, p);
    RunOptions opts;
    opts.check = CheckLevel::kSampled;
    opts.seed = cfg.seed;
    const RunResult r = run(p, sched, cfg.stop, opts);
    if (r.state.k != 2000) fail(v, name + " stopped at " + std::to_string(r.state.k));
    std::vector<std::string> needed = {"descent_inequality", "inertial_identity"};
    if (cfg.schedule.strong_mode) needed.push_back("strong_inequality");
    long checks = 0;
    for (const std::string& c : needed) {
      const CheckStat* s = r.invariants.find(c);
      if (!s || s->checks == 0) {
        fail(v, name + " has no " + c + " checks");
        continue;
      }
      checks += s->checks;
      if (s->violations) {
        fail(v, name + " " + c + ": " + std::to_string(s->violations) + " violations, first at k=" +
                    std::to_string(s->first_violation));
      }
    }
    if (r.invariants.total_violations()) {
      fail(v, name + " total violations " + std::to_string(r.invariants.total_violations()));
    }
    note(v, name + " " + std::to_string(checks) + " checks");
  }
  return v;
}

// Rounding floor of the measured surrogate <H(x*), ybar - x*> at row i:
// ybar is stored in doubles, so the inner product is only known to
// about eps * sum_j |H(x*)_j| (|ybar_j| + |x*_j|). Other measured columns
// get no allowance.
double measurement_floor(const RecordTable& t, std::size_t i, const std::string& measured,
                         const Vector& xs, const Vector& hxs) {
  if (measured.rfind("gap_hq_surr", 0) != 0) return 0.0;
  const std::string prefix = measured.size() > 11 && measured.substr(11) == "_w" ? "ybarw_" : "ybar_";
  double s = 0.0;
  for (Index j = 0; j < xs.size(); ++j) {
    s += std::abs(hxs[j]) * (std::abs(t.at(i, prefix + std::to_string(j))) + std::abs(xs[j]));
  }
  return 8.0 * std::numeric_limits<double>::epsilon() * s;
}

// Checks every ub_<measured>_by_<bound> column of a record table against its
// measured column and requires the listed bounds to be present.
void check_dominance(Verdict& v, const std::string& name, const RecordTable& t,
                     const std::vector<std::string>& required, long min_rows,
                     const Vector& xs, const Vector& hxs) {
  for (const std::string& r : required) {
    if (!t.index_of(r)) fail(v, name + " is missing " + r);
  }
  for (const std::string& col : t.columns()) {
    if (col.rfind("ub_", 0) != 0) continue;
    const std::string measured = col.substr(3, col.find("_by_") - 3);
    const std::vector<double> ub = t.column(col);
    const std::vector<double> m = t.column(measured);
    const std::vector<double> ks = t.column("k");
    long rows = 0;
    long floor_rows = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ub.size(); ++i) {
      if (ks[i] < 1 || !std::isfinite(ub[i]) || !std::isfinite(m[i])) continue;
      ++rows;
      min_slack = std::min(min_slack, ub[i] - m[i]);
      if (m[i] <= ub[i]) continue;
      if (m[i] <= ub[i] + measurement_floor(t, i, measured, xs, hxs)) {
        ++floor_rows;
        continue;
      }
      fail(v, name + " " + col + " violated at k=" + std::to_string(static_cast<long>(ks[i])) +
                  " by " + fmt("%.3e", m[i] - ub[i]));
      break;
    }
    if (rows < min_rows) fail(v, name + " " + col + " has only " + std::to_string(rows) + " rows");
    std::string line = name + " " + col.substr(3) + " min slack " + fmt("%.3g", min_slack);
    if (floor_rows) line += " (" + std::to_string(floor_rows) + " rows within rounding floor)";
    note(v, line);
  }
}

Verdict bound_dominance() {
  Verdict v;
  struct Case {
    std::string name;
    json eta;
    json alpha;
    bool strong;
    std::vector<std::string> required;
  };
  const std::vector<Case> cases = {
      {"dim/pen", eta_dimin(0.1, 0.5), alpha_pen(1, 0.1, 1e-4, 0.5), false,
       {"ub_gap_fx_by_feas_dim", "ub_gap_hq_surr_by_opt_dim"}},
      {"dim/zero", eta_dimin(0.1, 0.5), alpha_zero(), false,
       {"ub_gap_fx_by_feas_dim", "ub_gap_hq_surr_by_opt_dim"}},
      {"const/const", eta_const(0.1), alpha_const(0.5), false,
       {"ub_gap_fx_by_feas_const", "ub_gap_hq_surr_by_opt_const"}},
      {"const/pen", eta_const(0.1), alpha_pen(1, 0.1, 1e-4, 0.5), false,
       {"ub_gap_fx_by_feas_const", "ub_gap_hq_surr_by_opt_const"}},
      {"strong/const", eta_const(0.1), alpha_const(0.5), true,
       {"ub_gap_hq_surr_w_by_opt_strong", "ub_gap_fx_w_by_feas_strong"}},
      {"strong/zero", eta_const(0.1), alpha_zero(), true,
       {"ub_gap_hq_surr_w_by_opt_strong", "ub_gap_fx_w_by_feas_strong",
        "ub_gap_hq_surr_w_by_opt_strong_noinertia"}},
  };
  for (const Case& c : cases) {
    json j = preset_json("example1");
    j["stop"] = {{"max_iters", 2000}};
    j["schedule"]["eta"] = c.eta;
    j["schedule"]["alpha"] = c.alpha;
    j["schedule"]["strong_mode"] = c.strong;
    j["gap"] = {{"method", "exact-affine"}, {"stride", 1}};
    j["check_level"] = "off";
    const RunOutcome r = run_experiment(parse_run_config(j), "");
    if (!r.bounds_ok) fail(v, c.name + " reports a bound violation");
    const BilevelProblem p = make_example1();
    const Vector xs = *p.known_solution();
    check_dominance(v, c.name, r.records, c.required, 2000, xs, p.h()(xs));
  }
  return v;
}

Verdict linear_rate_witness() {
  Verdict v;
  json j = preset_json("example1");
  j["stop"] = {{"max_iters", 2000}};
  j["schedule"]["eta"] = eta_const(0.1);
  j["schedule"]["alpha"] = alpha_zero();
  j["schedule"]["strong_mode"] = true;
  j["check_level"] = "off";
  const RunOutcome r = run_experiment(parse_run_config(j), "");
  const std::string col = "ub_gap_hq_surr_w_by_opt_strong_noinertia";
  if (!r.records.index_of(col)) {
    fail(v, "no-inertia strong bound not emitted");
    return v;
  }
  const double beta = r.summary["schedule"]["beta_bar"].get<double>();
  const std::vector<double> ub = r.records.column(col);
  const std::vector<double> m = r.records.column("gap_hq_surr_w");
  const std::vector<double> ks = r.records.column("k");
  // Above this level the 1e-12 guard is at most a tenth of the bound; below
  // it the ratio compares the guard with itself.
  constexpr double kRatioFloor = 1e-11;
  long ratio_rows = 0;
  long decay_rows = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  double worst_decay = 0.0;
  for (std::size_t i = 0; i < ub.size(); ++i) {
    if (ks[i] < 1 || !std::isfinite(ub[i])) continue;
    if (ub[i] >= kRatioFloor) {
      const double denom = m[i] + 1e-12;
      const double ratio = denom > 0.0 ? ub[i] / denom : std::numeric_limits<double>::infinity();
      min_ratio = std::min(min_ratio, ratio);
      ++ratio_rows;
      if (!(ratio >= 1.0)) {
        fail(v, "ratio " + fmt("%.6g", ratio) + " at k=" + std::to_string(static_cast<long>(ks[i])));
        break;
      }
    }
    if (i + 1 < ub.size() && ks[i + 1] == ks[i] + 1 && std::isfinite(ub[i + 1]) && ub[i] > 0.0) {
      const double dev = std::abs(ub[i + 1] / ub[i] - (1.0 - beta));
      worst_decay = std::max(worst_decay, dev);
      ++decay_rows;
      if (!(dev <= 1e-12)) {
        fail(v, "decay deviates by " + fmt("%.3e", dev) + " at k=" +
                    std::to_string(static_cast<long>(ks[i])));
        break;
      }
    }
  }
  if (ratio_rows < 10) fail(v, "only " + std::to_string(ratio_rows) + " rows above the floor");
  if (decay_rows < 1000) fail(v, "only " + std::to_string(decay_rows) + " decay steps");
  note(v, "beta = " + fmt("%.6f", beta) + ", min ratio " + fmt("%.3g", min_ratio) + " over " +
              std::to_string(ratio_rows) + " rows with bound >= 1e-11, max |ratio - (1-beta)| " +
              fmt("%.2e", worst_decay) + " over " + std::to_string(decay_rows) + " steps");
  return v;
}

Verdict schedule_certificates() {
  Verdict v;
  for (double theta : {0.1, 0.5, 0.9}) {
    for (const json& eta : {eta_const(0.1), eta_dimin(0.1, 0.5)}) {
      json j = preset_json("example1");
      j["schedule"]["eta"] = eta;
      j["schedule"]["alpha"] = alpha_pen(0, theta, 1e-4, 0.5);
      j["stop"] = {{"max_iters", 10000}};
      const RunConfig cfg = parse_run_config(j);
      const BilevelProblem p = build_problem(cfg.problem);
      const Schedule sched = build_schedule(cfg, p);
      const double cap = s_upper_bound(theta);
      double worst = 0.0;
      long steps = 0;
      run(p, sched, cfg.stop, {}, [&](const SolverState& s, const IterationTrace&, const InvariantMonitor&) {
        worst = std::max(worst, s.schedule.s.value());
        ++steps;
      });
      if (steps != 10000) fail(v, "pen run stopped early");
      if (!(worst <= cap)) {
        fail(v, "theta=" + fmt("%.1f", theta) + " sum " + fmt("%.6g", worst) + " > " + fmt("%.6g", cap));
      }
      if (eta["rule"] == "Constant") {
        note(v, "theta=" + fmt("%.1f", theta) + " max sum " + fmt("%.4g", worst) + " <= " +
                    fmt("%.4g", cap));
      }
    }
  }

  for (const json& alpha : {alpha_const(0.5), alpha_pen(1, 0.1, 1e-4, 0.5)}) {
    json j = preset_json("example1");
    j["schedule"]["eta"] = eta_const(0.1);
    j["schedule"]["alpha"] = alpha;
    j["schedule"]["strong_mode"] = true;
    j["stop"] = {{"max_iters", 2000}};
    const RunConfig cfg = parse_run_config(j);
    const BilevelProblem p = build_problem(cfg.problem);
    const Schedule sched = build_schedule(cfg, p);
    const double d2 = std::pow(*p.d_x().value, 2);
    double prev = std::numeric_limits<double>::infinity();
    long monotone_breaks = 0;
    double worst_slack = std::numeric_limits<double>::infinity();
    run(p, sched, cfg.stop, {}, [&](const SolverState& s, const IterationTrace& tr, const InvariantMonitor&) {
      // p_{k-1} alpha_k, compared in log space with a rounding allowance.
      const double cur = tr.alpha > 0.0 ? tr.log_p_prev + std::log(tr.alpha)
                                        : -std::numeric_limits<double>::infinity();
      if (cur > prev + 1e-12 * std::max(1.0, std::abs(prev))) ++monotone_breaks;
      prev = cur;
      const double slack = 2.0 * s.k * d2 - s.schedule.sum_pdelta.value();
      worst_slack = std::min(worst_slack, slack);
    });
    const std::string name = std::string(alpha["rule"]);
    if (monotone_breaks) fail(v, name + ": p*alpha increased " + std::to_string(monotone_breaks) + " times");
    if (!(worst_slack >= -1e-9)) fail(v, name + ": weighted delta sum exceeds 2kD^2");
    note(v, "strong " + name + " min slack of 2kD^2 " + fmt("%.4g", worst_slack));
  }
  return v;
}

Verdict oracle_equivalences() {
  Verdict v;
  Rng rng(2718);
  double lemma_err = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double a = rng.uniform(0, 3), b = rng.uniform(0, 3), c = rng.uniform(0, 1);
    lemma_err = std::max(lemma_err, std::abs(lemma_min(a, b, c) - testing::lemma_grid(a, b, c)));
  }
  if (!(lemma_err <= 2e-3)) fail(v, "lemma_min error " + fmt("%.3e", lemma_err));
  note(v, "lemma_min max err " + fmt("%.1e", lemma_err));

  double proj_err = 0.0;
  double proj_obtuse = -1e300;
  for (int t = 0; t < 20; ++t) {
    const Matrix e = rng.uniform_matrix(2, 3, -1.0, 1.0);
    const Vector f = rng.uniform_vector(2, 0.2, 1.5);
    const bool nonneg = t % 2 == 0;
    const Vector x = rng.uniform_vector(3, -2.0, 2.0);
    const SimpleSet set = SimpleSet::polyhedron(e, f, nonneg);
    const Vector z = set.project(x);
    const testing::GridProjection g = testing::grid_projection(e, f, nonneg, x, z);
    proj_err = std::max(proj_err, std::abs((x - z).norm() - g.dist));
    proj_obtuse = std::max(proj_obtuse, g.obtuse);
  }
  if (!(proj_err <= 2e-3)) fail(v, "projection distance error " + fmt("%.3e", proj_err));
  if (!(proj_obtuse <= 1e-10)) {
    fail(v, "grid point beyond the projection: <x-z, g-z> = " + fmt("%.3e", proj_obtuse));
  }
  note(v, "projection max distance err " + fmt("%.1e", proj_err) + ", max <x-z, g-z> " +
              fmt("%.1e", proj_obtuse));

  double gap_err = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Matrix a = 0.5 * testing::random_monotone_matrix(rng, 2, 0.5);
    const Vector b = rng.uniform_vector(2, -1, 1);
    const Vector lo = rng.uniform_vector(2, -1, 0);
    const Vector hi = lo + rng.uniform_vector(2, 0.2, 1.0);
    const BilevelProblem p(ProblemSpec{.name = "box",
                                       .f = Operator::affine(a, b),
                                       .h = Operator::identity(2),
                                       .x = SimpleSet::box(lo, hi),
                                       .initial_point = lo});
    const Vector z = rng.uniform_vector(lo, hi);
    const double exact = gap_fx(z, p, GapMethod::kExactAffine).value;
    gap_err = std::max(gap_err, std::abs(exact - testing::grid_gap(p, z, lo, hi, 1000)));
  }
  if (!(gap_err <= 1e-3)) fail(v, "gap error " + fmt("%.3e", gap_err));
  note(v, "gap max err " + fmt("%.1e", gap_err));

  double grad_err = 0.0;
  TrafficNetwork net = load_network(default_network_path());
  for (double power : {1.0, 2.0, 4.0}) {
    for (Arc& arc : net.arcs) arc.n = power;
    for (int t = 0; t < 5; ++t) {
      const Vector h = rng.uniform_vector(net.num_paths(), 0.0, 400.0);
      const Vector g = net.total_cost_gradient(h);
      Vector fd(h.size());
      for (Index i = 0; i < h.size(); ++i) {
        const double step = 1e-4 * std::max(1.0, std::abs(h[i]));
        Vector hp = h, hm = h;
        hp[i] += step;
        hm[i] -= step;
        fd[i] = (net.total_cost(hp) - net.total_cost(hm)) / (2.0 * step);
      }
      grad_err = std::max(grad_err, (fd - g).norm() / g.norm());
    }
  }
  if (!(grad_err <= 1e-6)) fail(v, "traffic gradient rel err " + fmt("%.3e", grad_err));
  note(v, "traffic gradient max rel err " + fmt("%.1e", grad_err));
  return v;
}

Verdict threshold_consistency() {
  Verdict v;
  Rng rng(31415);
  double worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < 50; ++t) {
    const double eps = std::pow(10.0, rng.uniform(-3, 0));
    const double d = rng.uniform(0.5, 20);
    const double lam_hi = rng.uniform(0.1, 2);
    const double lam_lo = lam_hi * rng.uniform(0.3, 1);
    const double l = rng.uniform(0.05, 0.95) / lam_hi;
    const double mu = rng.uniform(0.1, 3);
    const double c_h = rng.uniform(0.1, 10);
    const double floor = lam_hi * c_h * d / lam_lo;
    const double d0 = std::max(floor, eps) * rng.uniform(1.01, 3);
    const double eta_opt = rng.uniform(0.01, 1);

    StrongThresholdInput in{.eps = eps, .d_x = d, .lambda_lo = lam_lo, .lambda_hi = lam_hi,
                            .l = l, .mu = mu, .eta = eta_opt, .d0 = d0};
    const StrongThresholds k = strong_thresholds(in);
    const double one_minus = 1.0 - lam_hi * lam_hi * l * l;
    const double beta_opt = 1.0 / (1.0 / one_minus + 1.0 / (2.0 * lam_lo * eta_opt * mu));
    const double eta = recommended_eta(eps, d0);
    const double beta = 1.0 / (1.0 / one_minus + 1.0 / (2.0 * lam_lo * eta * mu));

    BoundConstants c{.d_x = d, .lambda_lo = lam_lo, .lambda_hi = lam_hi, .eta = eta_opt,
                     .b = 0.5, .c_h = c_h};
    std::vector<double> ratios;
    ratios.push_back(strong_bound_optimality_closed(k.k_opt, c, beta_opt) / eps);
    c.eta = eta;
    if (!k.k_feas || !k.k_joint) {
      fail(v, "missing feasibility or joint threshold");
      continue;
    }
    ratios.push_back(strong_bound_feasibility_closed(*k.k_feas, c, beta) / eps);
    ratios.push_back(strong_bound_optimality_closed(*k.k_joint, c, beta) / eps);
    ratios.push_back(strong_bound_feasibility_closed(*k.k_joint, c, beta) / eps);

    const double shat = rng.uniform(0, 5);
    const long kc = threshold_constant_eta(eps, d0, d, shat, lam_lo, floor);
    ratios.push_back(bound_optimality_constant(kc, c, shat) / eps);
    ratios.push_back(bound_feasibility_constant(kc, c, shat) / eps);

    for (std::size_t i = 0; i < ratios.size(); ++i) {
      const double r = ratios[i];
      worst = std::max(worst, r);
      if (!(r <= 1.0)) {
        fail(v, "set " + std::to_string(t) + " bound/eps = " + fmt("%.17g", r) + " #" + std::to_string(i));
        break;
      }
    }
  }
  note(v, "50 sets, max bound/eps at threshold " + fmt("%.4f", worst));
  return v;
}

Verdict qualitative_examples() {
  Verdict v;
  int better = 0;
  int phi_ok = 0;
  for (int seed = 1; seed <= 10; ++seed) {
    json j = preset_json("example2");
    j["problem"]["seed"] = seed;
    const RunOutcome inertial = run_experiment(parse_run_config(j), "");
    j["schedule"]["alpha"] = alpha_zero();
    const RunOutcome ireg = run_experiment(parse_run_config(j), "");
    const std::vector<double> phi = inertial.records.column("phi");
    const std::vector<double> dk = inertial.records.column("D_k");
    bool finite = true;
    for (std::size_t i = 0; i + 1 < dk.size(); ++i) finite &= std::isfinite(dk[i]) && std::isfinite(phi[i]);
    if (!finite) fail(v, "example2 seed " + std::to_string(seed) + " has non-finite values");
    if (last_finite(phi) <= 0.1 * first_finite(phi)) {
      ++phi_ok;
    } else {
      fail(v, "example2 seed " + std::to_string(seed) + " phi " + fmt("%.4g", first_finite(phi)) +
                  " -> " + fmt("%.4g", last_finite(phi)));
    }
    const double d_in = last_finite(dk);
    const double d_ir = last_finite(ireg.records.column("D_k"));
    if (d_in <= d_ir) ++better;
  }
  if (better < 8) fail(v, "constant alpha ahead on only " + std::to_string(better) + " of 10 seeds");
  note(v, "example2: phi reduced 10x on " + std::to_string(phi_ok) + "/10 seeds, constant alpha D_k <= IREG on " +
              std::to_string(better) + "/10");

  const RunOutcome ex3 = run_experiment(parse_run_config(preset_json("example3")), "");
  const std::vector<double> phi = ex3.records.column("phi");
  const std::vector<double> dk = ex3.records.column("D_k");
  bool finite = true;
  for (std::size_t i = 0; i + 1 < dk.size(); ++i) finite &= std::isfinite(dk[i]) && std::isfinite(phi[i]);
  if (!finite) fail(v, "example3 has non-finite values");
  const double p0 = first_finite(phi), p1 = last_finite(phi);
  if (!(p1 <= 0.1 * p0)) fail(v, "example3 phi " + fmt("%.4g", p0) + " -> " + fmt("%.4g", p1));
  note(v, "example3 phi " + fmt("%.4g", p0) + " -> " + fmt("%.4g", p1) + ", final D_k " +
              fmt("%.3g", last_finite(dk)));
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria = {
      {"example1 solution reproduction", example1_reproduction},
      {"non-inertial reduction", noninertial_reduction},
      {"per-iteration invariant suite", invariant_suite},
      {"bound dominance on example1", bound_dominance},
      {"linear-rate witness", linear_rate_witness},
      {"schedule certificates", schedule_certificates},
      {"oracle equivalences", oracle_equivalences},
      {"threshold self-consistency", threshold_consistency},
      {"examples 2-3 qualitative reproduction", qualitative_examples},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double t = seconds_since(t0);
    std::printf("[%s] %s (%.2f s): %s\n", v.pass ? "PASS" : "FAIL", c.name, t, v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
