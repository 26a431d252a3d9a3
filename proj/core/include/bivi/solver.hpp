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

#ifndef BIVI_SOLVER_HPP_
#define BIVI_SOLVER_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bivi/common.hpp"
#include "bivi/problem.hpp"
#include "bivi/schedule.hpp"

namespace bivi {

// Overflow or NaN during an iteration. The state passed to step() is left
// untouched.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long k) : Error(what), k_(k) {}
  long iteration() const { return k_; }

 private:
  long k_;
};

/// Weighted running mean sum_j w_j y_j / sum_j w_j with the total weight
/// kept in log space, so geometrically growing weights never overflow.
class ErgodicMean {
 public:
  void add(const Vector& y, double log_weight);
  bool empty() const { return count_ == 0; }
  long count() const { return count_; }
  double log_total() const { return log_total_; }
  // Throws DomainError when empty.
  const Vector& value() const;

 private:
  Vector mean_;
  double log_total_ = -std::numeric_limits<double>::infinity();
  long count_ = 0;
};

enum class Weighting { kPlain, kStrong };

struct SolverState {
  long k = 0;  // completed iterations
  Vector x_prev;
  Vector x;
  Vector w;
  Vector w_prime;
  Vector y;
  ErgodicMean plain;     // weights lambda_j
  ErgodicMean weighted;  // weights lambda_j eta_j p_j (strong mode)
  ScheduleState schedule;
  double last_step_norm = 0.0;
};

SolverState initial_state(const BilevelProblem& problem, const Schedule& schedule);

/// The ergodic mean after k >= 1 iterations; throws DomainError at k = 0.
Vector ergodic_mean(const SolverState& state, Weighting weighting);

/// Everything about iteration k that the diagnostics need.
struct IterationTrace {
  long k = 0;
  double alpha = 0.0;
  double eta = 0.0;
  double lambda = 0.0;
  double beta = 0.0;
  double log_p = 0.0;       // log p_k
  double log_p_prev = 0.0;  // log p_{k-1}
  double delta = 0.0;
  double l_k = 0.0;
  Vector x_prev;  // x_{k-1}
  Vector x;       // x_k
  Vector w;
  Vector y;
  Vector x_next;  // x_{k+1}
  Vector fy;      // F(y_k)
  Vector hy;      // H(y_k)
  double step_norm = 0.0;  // |x_{k+1} - x_k|
};

/// One iteration of the inertial regularized extragradient method:
///
///   w_k     = x_k + alpha_k (x_k - x_{k-1}),   w'_k = P_Omega(w_k)
///   y_k     = P_X(w_k - lambda_k (F(w'_k) + eta_k H(w'_k)))
///   x_{k+1} = P_X(w_k - lambda_k (F(y_k) + eta_k H(y_k)))
///
/// then updates both ergodic means and advances the schedule.
IterationTrace step(SolverState& state, const BilevelProblem& problem,
                    const Schedule& schedule);

enum class CheckLevel { kOff, kSampled, kFull };
std::string_view to_string(CheckLevel level);
CheckLevel parse_check_level(std::string_view text);

struct CheckStat {
  std::string name;
  long checks = 0;
  long violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  long first_violation = -1;
};

struct InvariantReport {
  std::vector<CheckStat> stats;
  long total_violations() const;
  bool ok() const { return total_violations() == 0; }
  const CheckStat* find(std::string_view name) const;
};

/// Slack of the per-iteration inequalities at the last observed iteration,
/// minimised over the sampled points. Negative means violated.
struct IterationResiduals {
  double descent = std::numeric_limits<double>::quiet_NaN();
  double identity = std::numeric_limits<double>::quiet_NaN();
  double strong = std::numeric_limits<double>::quiet_NaN();
};

/// Runtime checks of the per-iteration inequalities and schedule invariants
/// at points of X sampled once per run (20 when sampled, 200 plus the known
/// solution when full).
///
///   descent:  |w-x|^2 - |x+ - x|^2 >= (1 - lambda^2 L_k^2)|w-y|^2
///             + 2 lambda <F(y), y-x> + 2 lambda eta <H(y), y-x>
///   identity: |w-x|^2 = phi_k + alpha (phi_k - phi_{k-1}) + delta_k
///   strong:   (1-beta_k)|w-x|^2 - |x+ - x|^2 >= 2 lambda <F(x), y-x>
///             + 2 lambda eta <H(x), y-x>
class InvariantMonitor {
 public:
  InvariantMonitor(const BilevelProblem& problem, const Schedule& schedule,
                   CheckLevel level, std::uint64_t seed);

  void observe(const SolverState& after, const IterationTrace& trace);

  CheckLevel level() const { return level_; }
  const InvariantReport& report() const { return report_; }
  const IterationResiduals& last() const { return last_; }
  const std::vector<Vector>& points() const { return points_; }

 private:
  CheckStat& stat(std::string_view name);
  void record(std::string_view name, double slack, long k);

  const BilevelProblem& problem_;
  const Schedule& schedule_;
  CheckLevel level_;
  std::vector<Vector> points_;
  std::vector<Vector> f_points_;
  std::vector<Vector> h_points_;
  std::optional<double> s_cap_;
  std::optional<double> beta_bar_;
  InvariantReport report_;
  IterationResiduals last_;
};

struct StoppingRule {
  std::optional<long> max_iters;
  std::optional<double> tol_step;
  std::optional<double> tol_ergodic;
  std::optional<double> tol_known_solution;
  // Throws ConfigError when no criterion is set or a value is invalid.
  void validate() const;
};

enum class StopReason { kMaxIters, kStep, kErgodic, kKnownSolution, kDiverged };
std::string_view to_string(StopReason reason);

struct RunOptions {
  CheckLevel check = CheckLevel::kOff;
  std::uint64_t seed = 1;
};

struct RunResult {
  SolverState state;
  StopReason reason = StopReason::kMaxIters;
  std::string divergence_message;
  InvariantReport invariants;
};

using Observer = std::function<void(const SolverState&, const IterationTrace&,
                                    const InvariantMonitor&)>;

/// Iterates until the first stopping criterion fires. The observer sees
/// every iteration after the invariant checks ran.
RunResult run(const BilevelProblem& problem, const Schedule& schedule,
              const StoppingRule& stop, const RunOptions& options = {},
              const Observer& observer = {});

}  // namespace bivi

#endif  // BIVI_SOLVER_HPP_
