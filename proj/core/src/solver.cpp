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

#include "bivi/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bivi/rng.hpp"

namespace bivi {
namespace {

constexpr int kSampledPoints = 20;
constexpr int kFullPoints = 200;
constexpr double kInequalityTol = 1e-7;
constexpr double kIdentityTol = 1e-9;
constexpr double kMembershipTol = 1e-9;
constexpr double kScheduleTol = 1e-12;

double log_add(double a, double b) {
  if (std::isinf(a) && a < 0) return b;
  if (std::isinf(b) && b < 0) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void require_finite(const Vector& v, const char* what, long k) {
  if (!v.allFinite()) {
    throw DivergenceError(std::string("non-finite ") + what + " at iteration " +
                              std::to_string(k),
                          k);
  }
}

}  // namespace

void ErgodicMean::add(const Vector& y, double log_weight) {
  if (count_ == 0) {
    mean_ = y;
    log_total_ = log_weight;
  } else {
    const double total = log_add(log_total_, log_weight);
    const double t = std::exp(log_weight - total);
    mean_ += t * (y - mean_);
    log_total_ = total;
  }
  ++count_;
}

const Vector& ErgodicMean::value() const {
  if (count_ == 0) throw DomainError("ergodic mean is undefined before the first iteration");
  return mean_;
}

SolverState initial_state(const BilevelProblem& problem, const Schedule& schedule) {
  SolverState st;
  st.k = 0;
  st.x = problem.initial_point();
  st.x_prev = st.x;
  st.w = st.x;
  st.w_prime = st.x;
  st.y = st.x;
  st.schedule = schedule_start(schedule);
  return st;
}

Vector ergodic_mean(const SolverState& state, Weighting weighting) {
  if (state.k < 1) throw DomainError("ergodic mean needs k >= 1");
  return weighting == Weighting::kPlain ? state.plain.value() : state.weighted.value();
}

IterationTrace step(SolverState& st, const BilevelProblem& problem,
                    const Schedule& schedule) {
  const ScheduleState& sc = st.schedule;
  const long k = st.k;
  const double lambda = sc.lambda;
  const double eta = sc.eta;

  Vector w = st.x + sc.alpha * (st.x - st.x_prev);
  require_finite(w, "extrapolated point", k);
  Vector w_prime = problem.omega().project(w);
  const Vector g1 = problem.f()(w_prime) + eta * problem.h()(w_prime);
  require_finite(g1, "operator value", k);
  Vector y = problem.x_set().project(w - lambda * g1);
  Vector fy = problem.f()(y);
  Vector hy = problem.h()(y);
  Vector x_next = problem.x_set().project(w - lambda * (fy + eta * hy));
  require_finite(y, "y iterate", k);
  require_finite(x_next, "x iterate", k);

  IterationTrace tr;
  tr.k = k;
  tr.alpha = sc.alpha;
  tr.eta = eta;
  tr.lambda = lambda;
  tr.beta = sc.beta;
  tr.log_p = sc.log_p;
  tr.log_p_prev = sc.log_p_prev;
  tr.delta = sc.delta;
  tr.l_k = schedule.l_at(eta);
  tr.step_norm = (x_next - st.x).norm();

  schedule_commit(st.schedule);
  st.plain.add(y, std::log(lambda));
  if (schedule.strong_mode()) {
    st.weighted.add(y, std::log(lambda) + std::log(eta) + sc.log_p);
  }

  tr.x_prev = std::move(st.x_prev);
  tr.x = st.x;
  tr.w = w;
  tr.y = y;
  tr.x_next = x_next;
  tr.fy = std::move(fy);
  tr.hy = std::move(hy);

  st.x_prev = std::move(st.x);
  st.x = std::move(x_next);
  st.w = std::move(w);
  st.w_prime = std::move(w_prime);
  st.y = std::move(y);
  st.last_step_norm = tr.step_norm;
  st.k = k + 1;
  schedule_advance(st.schedule, schedule, tr.step_norm);
  return tr;
}

std::string_view to_string(CheckLevel level) {
  switch (level) {
    case CheckLevel::kOff:
      return "off";
    case CheckLevel::kSampled:
      return "sampled";
    case CheckLevel::kFull:
      return "full";
  }
  return "off";
}

CheckLevel parse_check_level(std::string_view text) {
  if (text == "off") return CheckLevel::kOff;
  if (text == "sampled") return CheckLevel::kSampled;
  if (text == "full") return CheckLevel::kFull;
  throw ConfigError("unknown check level '" + std::string(text) +
                    "' (expected off, sampled or full)");
}

long InvariantReport::total_violations() const {
  long n = 0;
  for (const auto& s : stats) n += s.violations;
  return n;
}

const CheckStat* InvariantReport::find(std::string_view name) const {
  for (const auto& s : stats) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

InvariantMonitor::InvariantMonitor(const BilevelProblem& problem,
                                   const Schedule& schedule, CheckLevel level,
                                   std::uint64_t seed)
    : problem_(problem), schedule_(schedule), level_(level) {
  if (level_ == CheckLevel::kOff) return;
  const int count = level_ == CheckLevel::kFull ? kFullPoints : kSampledPoints;
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    points_.push_back(problem.x_set().sample(rng, problem.sample_radius()));
  }
  if (level_ == CheckLevel::kFull && problem.known_solution()) {
    points_.push_back(*problem.known_solution());
  }
  if (schedule.strong_mode()) {
    for (const Vector& p : points_) {
      f_points_.push_back(problem.f()(p));
      h_points_.push_back(problem.h()(p));
    }
    if (schedule.constant_eta()) beta_bar_ = schedule.beta_bar();
  }
  if (const auto* pen = std::get_if<AlphaAdaptivePen>(&schedule.config().alpha)) {
    if (pen->m == 0) s_cap_ = s_upper_bound(pen->theta);
  }
}

CheckStat& InvariantMonitor::stat(std::string_view name) {
  for (auto& s : report_.stats) {
    if (s.name == name) return s;
  }
  report_.stats.push_back(CheckStat{std::string(name)});
  return report_.stats.back();
}

void InvariantMonitor::record(std::string_view name, double slack, long k) {
  CheckStat& s = stat(name);
  ++s.checks;
  s.worst_slack = std::min(s.worst_slack, slack);
  if (!(slack >= 0.0)) {
    if (s.violations == 0) s.first_violation = k;
    ++s.violations;
  }
}

void InvariantMonitor::observe(const SolverState& after, const IterationTrace& t) {
  last_ = IterationResiduals{};
  if (level_ == CheckLevel::kOff) return;
  const long k = t.k;
  const bool strong = schedule_.strong_mode();

  double descent = std::numeric_limits<double>::infinity();
  double identity = descent;
  double strong_slack = descent;
  const double a_coef = 1.0 - t.lambda * t.lambda * t.l_k * t.l_k;
  const double wy2 = (t.w - t.y).squaredNorm();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Vector& p = points_[i];
    const double wx2 = (t.w - p).squaredNorm();
    const double xn2 = (t.x_next - p).squaredNorm();
    const Vector yp = t.y - p;
    const double rhs = a_coef * wy2 + 2.0 * t.lambda * t.fy.dot(yp) +
                       2.0 * t.lambda * t.eta * t.hy.dot(yp);
    descent = std::min(descent, (wx2 - xn2) - rhs + kInequalityTol * (1.0 + wx2));

    const double phi = (t.x - p).squaredNorm();
    const double phi_prev = (t.x_prev - p).squaredNorm();
    const double id_rhs = phi + t.alpha * (phi - phi_prev) + t.delta;
    const double mag = wx2 + phi + t.alpha * (phi + phi_prev) + t.delta;
    identity = std::min(identity, kIdentityTol * mag - std::abs(wx2 - id_rhs));

    if (strong) {
      const double lhs = (1.0 - t.beta) * wx2 - xn2;
      const double srhs = 2.0 * t.lambda * f_points_[i].dot(yp) +
                          2.0 * t.lambda * t.eta * h_points_[i].dot(yp);
      strong_slack =
          std::min(strong_slack, lhs - srhs + kInequalityTol * (1.0 + wx2));
    }
  }
  if (!points_.empty()) {
    record("descent_inequality", descent, k);
    record("inertial_identity", identity, k);
    last_.descent = descent;
    last_.identity = identity;
    if (strong) {
      record("strong_inequality", strong_slack, k);
      last_.strong = strong_slack;
    }
  }

  // Iterates and ergodic means stay in X.
  const SimpleSet& x_set = problem_.x_set();
  auto member_slack = [&](const Vector& v) {
    return kMembershipTol * std::max(1.0, v.norm()) - (x_set.project(v) - v).norm();
  };
  double member = std::min(member_slack(t.y), member_slack(t.x_next));
  member = std::min(member, member_slack(after.plain.value()));
  if (strong) member = std::min(member, member_slack(after.weighted.value()));
  record("membership", member, k);

  // Schedule invariants.
  const ScheduleState& sc = after.schedule;  // values of iteration k + 1
  record("alpha_range", std::min(t.alpha, 1.0 - t.alpha), k);
  record("eta_nonincreasing", t.eta - sc.eta + kScheduleTol * t.eta, k);
  if (schedule_.alpha_over_eta_nonincreasing()) {
    const double r0 = t.alpha / t.eta;
    const double r1 = sc.alpha / sc.eta;
    record("alpha_over_eta_nonincreasing", r0 - r1 + kScheduleTol * (1.0 + r0), k);
  }
  if (s_cap_) {
    record("s_partial_bound", *s_cap_ - after.schedule.s.value() + kScheduleTol, k);
  }

  const long count = k + 1;  // terms in the ergodic sums
  const double lam_lo = schedule_.lambda_lo();
  const double need = std::log(lam_lo * static_cast<double>(count));
  record("lambda_sum", after.plain.log_total() - need + kScheduleTol * (1.0 + std::abs(need)), k);

  if (strong) {
    // p_{k-1} alpha_k  >=  p_k alpha_{k+1}
    const double before = std::exp(t.log_p_prev) * t.alpha;
    const double now = std::exp(sc.log_p_prev) * sc.alpha;
    record("p_alpha_nonincreasing", before - now + kScheduleTol * (1.0 + before), k);
    if (problem_.d_x().known()) {
      const double d2 = *problem_.d_x().value * *problem_.d_x().value;
      const double term = std::exp(t.log_p_prev) * t.delta;
      record("pdelta_term", 2.0 * d2 - term + 1e-9, k);
      record("pdelta_sum",
             2.0 * static_cast<double>(count) * d2 - after.schedule.sum_pdelta.value() + 1e-9,
             k);
    }
    if (beta_bar_) {
      const double need_s = std::log(lam_lo * schedule_.eta0()) -
                            static_cast<double>(count) * std::log1p(-*beta_bar_);
      record("lambda_sum_strong",
             after.weighted.log_total() - need_s + kScheduleTol * (1.0 + std::abs(need_s)), k);
    }
  }
}

void StoppingRule::validate() const {
  if (!max_iters && !tol_step && !tol_ergodic && !tol_known_solution) {
    throw ConfigError("stopping rule needs at least one criterion");
  }
  if (max_iters && *max_iters < 0) throw ConfigError("max_iters must be >= 0");
  for (const auto* t : {&tol_step, &tol_ergodic, &tol_known_solution}) {
    if (*t && !(**t > 0.0)) throw ConfigError("stopping tolerances must be > 0");
  }
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kMaxIters:
      return "max_iters";
    case StopReason::kStep:
      return "tol_step";
    case StopReason::kErgodic:
      return "tol_ergodic";
    case StopReason::kKnownSolution:
      return "tol_known_solution";
    case StopReason::kDiverged:
      return "diverged";
  }
  return "unknown";
}

RunResult run(const BilevelProblem& problem, const Schedule& schedule,
              const StoppingRule& stop, const RunOptions& options,
              const Observer& observer) {
  stop.validate();
  if (stop.tol_known_solution && !problem.known_solution()) {
    throw ConfigError("tol_known_solution needs a problem with a known solution");
  }
  RunResult out;
  out.state = initial_state(problem, schedule);
  InvariantMonitor monitor(problem, schedule, options.check, options.seed);
  SolverState& st = out.state;

  while (true) {
    if (stop.max_iters && st.k >= *stop.max_iters) {
      out.reason = StopReason::kMaxIters;
      break;
    }
    Vector ybar_before;
    if (stop.tol_ergodic && st.k >= 1) ybar_before = st.plain.value();
    IterationTrace tr;
    try {
      tr = step(st, problem, schedule);
    } catch (const DivergenceError& e) {
      out.reason = StopReason::kDiverged;
      out.divergence_message = e.what();
      break;
    }
    monitor.observe(st, tr);
    if (observer) observer(st, tr, monitor);

    if (stop.tol_step && tr.step_norm <= *stop.tol_step) {
      out.reason = StopReason::kStep;
      break;
    }
    if (stop.tol_ergodic && ybar_before.size() > 0 &&
        (st.plain.value() - ybar_before).norm() <= *stop.tol_ergodic) {
      out.reason = StopReason::kErgodic;
      break;
    }
    if (stop.tol_known_solution &&
        (st.x - *problem.known_solution()).norm() <= *stop.tol_known_solution) {
      out.reason = StopReason::kKnownSolution;
      break;
    }
  }
  out.invariants = monitor.report();
  return out;
}

}  // namespace bivi
