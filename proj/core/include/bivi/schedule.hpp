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

#ifndef BIVI_SCHEDULE_HPP_
#define BIVI_SCHEDULE_HPP_

#include <optional>
#include <string_view>
#include <variant>

#include "bivi/common.hpp"

namespace bivi {

struct EtaConstant {
  double eta = 0.1;
};
// eta_k = eta0 / (k+1)^b
struct EtaDiminishing {
  double eta0 = 0.1;
  double b = 0.5;
};
using EtaRule = std::variant<EtaConstant, EtaDiminishing>;

struct AlphaZero {};
struct AlphaConstant {
  double alpha = 0.5;
};
// alpha_k = (eta_k/eta_{k-1}) alpha_{k-1}                              k < m
// alpha_k = eta_k min{theta^k / (|x_k - x_{k-1}|^2 + rho), alpha_{k-1}/eta_{k-1}}  k >= m
struct AlphaAdaptivePen {
  long m = 1;
  double theta = 0.1;
  double rho = 1e-4;
  double alpha0 = 0.5;
};
// alpha_k = xi_0 for k < m and xi_{k-m} afterwards, xi_j = xi0 / (j+1)^power.
struct AlphaSummableTail {
  long m = 0;
  double xi0 = 0.5;
  double power = 2.0;
};
using AlphaRule =
    std::variant<AlphaZero, AlphaConstant, AlphaAdaptivePen, AlphaSummableTail>;

struct LambdaConstant {
  double lambda = 1.0;
};
// Alternates hi (even k) and lo (odd k), so both ends of the interval occur.
struct LambdaInterval {
  double lo = 0.5;
  double hi = 1.0;
};
using LambdaRule = std::variant<LambdaConstant, LambdaInterval>;

struct ScheduleConfig {
  EtaRule eta = EtaConstant{};
  AlphaRule alpha = AlphaZero{};
  std::optional<LambdaRule> lambda;  // 0.99 / (L_F + eta_0 L_H) when absent
  bool strong_mode = false;
};

std::string_view rule_name(const EtaRule& r);
std::string_view rule_name(const AlphaRule& r);
std::string_view rule_name(const LambdaRule& r);

double eta_at(const EtaRule& rule, long k);
double initial_eta(const EtaRule& rule);
double alpha_initial(const AlphaRule& rule);

/// alpha_k for k >= 1 from the previous values; clamped into [0, 1].
double alpha_next(const AlphaRule& rule, long k, double eta_k, double eta_prev,
                  double alpha_prev, double step_norm);

double lambda_at(const LambdaRule& rule, long k);
double lambda_lo(const LambdaRule& rule);
double lambda_hi(const LambdaRule& rule);

/// 2 theta / (1 - theta): the bound on sum delta_k / eta_k for the pen rule
/// with m = 0. Throws DomainError unless 0 < theta < 1.
double s_upper_bound(double theta);

/// (1/(1 - lambda^2 L^2) + 1/(2 lambda eta mu))^-1. Requires mu > 0 and
/// 0 < lambda < 1/L.
double beta_at(double lambda, double eta, double mu, double l);

double p_next(double p_prev, double beta);
double delta_at(double alpha, double step_norm);

/// Validated schedule bound to the constants of one problem.
class Schedule {
 public:
  Schedule(ScheduleConfig config, double l_f, double l_h, double mu);

  const ScheduleConfig& config() const { return config_; }
  const LambdaRule& lambda_rule() const { return lambda_; }
  bool strong_mode() const { return config_.strong_mode; }
  double lambda_lo() const { return bivi::lambda_lo(lambda_); }
  double lambda_hi() const { return bivi::lambda_hi(lambda_); }
  double eta0() const { return initial_eta(config_.eta); }
  bool constant_eta() const {
    return std::holds_alternative<EtaConstant>(config_.eta);
  }
  bool inertia_free() const {
    return std::holds_alternative<AlphaZero>(config_.alpha);
  }
  double l_f() const { return l_f_; }
  double l_h() const { return l_h_; }
  double mu() const { return mu_; }
  double l_at(double eta) const { return l_f_ + eta * l_h_; }

  // beta from the interval ends with L = L_F + eta L_H; strong mode with a
  // constant eta only.
  double beta_bar() const;

  // Whether the rules guarantee alpha_k/eta_k nonincreasing for every run.
  bool alpha_over_eta_nonincreasing() const;

 private:
  ScheduleConfig config_;
  LambdaRule lambda_;
  double l_f_;
  double l_h_;
  double mu_;
};

/// Parameter values of the current iteration k and the running sums over
/// the committed iterations. p is stored as log p to survive geometric
/// growth.
struct ScheduleState {
  long k = 0;
  double eta = 0.0;
  double eta_prev = 0.0;
  double alpha = 0.0;
  double alpha_prev = 0.0;
  double lambda = 0.0;
  double beta = 0.0;        // strong mode
  double log_p = 0.0;       // log p_k
  double log_p_prev = 0.0;  // log p_{k-1}, p_{-1} = 1
  double delta = 0.0;
  CompensatedSum s;           // sum delta_j / eta_j
  CompensatedSum shat;        // sum delta_j
  CompensatedSum sum_pdelta;  // sum p_{j-1} delta_j
  double max_ratio_increase = 0.0;  // max of alpha_k/eta_k - alpha_{k-1}/eta_{k-1}
};

/// Values for k = 0 (delta_0 = 0 since x_0 = x_{-1}).
ScheduleState schedule_start(const Schedule& schedule);

/// Moves the state to iteration k + 1; step_norm = |x_{k+1} - x_k|.
void schedule_advance(ScheduleState& state, const Schedule& schedule,
                      double step_norm);

/// Adds delta_k of the current iteration to the running sums.
void schedule_commit(ScheduleState& state);

}  // namespace bivi

#endif  // BIVI_SCHEDULE_HPP_
