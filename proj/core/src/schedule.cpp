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

#include "bivi/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace bivi {
namespace {

constexpr double kDefaultLambdaFactor = 0.99;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void validate_eta(const EtaRule& rule) {
  std::visit(Overloaded{
                 [](const EtaConstant& r) {
                   if (!(r.eta > 0.0)) throw DomainError("constant eta must be > 0");
                 },
                 [](const EtaDiminishing& r) {
                   if (!(r.eta0 > 0.0 && r.eta0 <= 1.0)) {
                     throw DomainError("diminishing eta needs 0 < eta0 <= 1");
                   }
                   if (!(r.b > 0.0 && r.b < 1.0)) {
                     throw DomainError("diminishing eta needs 0 < b < 1");
                   }
                 }},
             rule);
}

void validate_alpha(const AlphaRule& rule) {
  std::visit(Overloaded{
                 [](const AlphaZero&) {},
                 [](const AlphaConstant& r) {
                   if (!(r.alpha >= 0.0 && r.alpha <= 1.0)) {
                     throw DomainError("constant alpha must lie in [0, 1]");
                   }
                 },
                 [](const AlphaAdaptivePen& r) {
                   if (r.m < 0) throw DomainError("pen rule needs m >= 0");
                   if (!(r.theta > 0.0 && r.theta < 1.0)) {
                     throw DomainError("pen rule needs 0 < theta < 1");
                   }
                   if (!(r.rho >= 0.0)) throw DomainError("pen rule needs rho >= 0");
                   if (!(r.alpha0 >= 0.0 && r.alpha0 <= 1.0)) {
                     throw DomainError("pen rule needs alpha0 in [0, 1]");
                   }
                 },
                 [](const AlphaSummableTail& r) {
                   if (r.m < 0) throw DomainError("summable tail needs m >= 0");
                   if (!(r.xi0 >= 0.0 && r.xi0 <= 1.0)) {
                     throw DomainError("summable tail needs xi0 in [0, 1]");
                   }
                   if (!(r.power > 1.0)) {
                     throw DomainError("summable tail needs power > 1");
                   }
                 }},
             rule);
}

}  // namespace

std::string_view rule_name(const EtaRule& r) {
  return std::holds_alternative<EtaConstant>(r) ? "Constant" : "Diminishing";
}

std::string_view rule_name(const AlphaRule& r) {
  return std::visit(Overloaded{[](const AlphaZero&) { return std::string_view("Zero"); },
                               [](const AlphaConstant&) { return std::string_view("Constant"); },
                               [](const AlphaAdaptivePen&) { return std::string_view("AdaptivePen"); },
                               [](const AlphaSummableTail&) { return std::string_view("SummableTail"); }},
                    r);
}

std::string_view rule_name(const LambdaRule& r) {
  return std::holds_alternative<LambdaConstant>(r) ? "Constant" : "Interval";
}

double eta_at(const EtaRule& rule, long k) {
  return std::visit(
      Overloaded{[](const EtaConstant& r) { return r.eta; },
                 [k](const EtaDiminishing& r) {
                   return r.eta0 / std::pow(static_cast<double>(k) + 1.0, r.b);
                 }},
      rule);
}

double initial_eta(const EtaRule& rule) { return eta_at(rule, 0); }

double alpha_initial(const AlphaRule& rule) {
  return std::visit(Overloaded{[](const AlphaZero&) { return 0.0; },
                               [](const AlphaConstant& r) { return r.alpha; },
                               [](const AlphaAdaptivePen& r) { return r.alpha0; },
                               [](const AlphaSummableTail& r) { return r.xi0; }},
                    rule);
}

double alpha_next(const AlphaRule& rule, long k, double eta_k, double eta_prev,
                  double alpha_prev, double step_norm) {
  const double a = std::visit(
      Overloaded{
          [](const AlphaZero&) { return 0.0; },
          [](const AlphaConstant& r) { return r.alpha; },
          [&](const AlphaAdaptivePen& r) {
            if (k < r.m) return (eta_k / eta_prev) * alpha_prev;
            const double ratio = alpha_prev / eta_prev;
            const double denom = step_norm * step_norm + r.rho;
            const double pen = denom > 0.0
                                   ? std::pow(r.theta, static_cast<double>(k)) / denom
                                   : std::numeric_limits<double>::infinity();
            return eta_k * std::min(pen, ratio);
          },
          [k](const AlphaSummableTail& r) {
            const long j = k < r.m ? 0 : k - r.m;
            return r.xi0 / std::pow(static_cast<double>(j) + 1.0, r.power);
          }},
      rule);
  return clamp01(a);
}

double lambda_at(const LambdaRule& rule, long k) {
  return std::visit(Overloaded{[](const LambdaConstant& r) { return r.lambda; },
                               [k](const LambdaInterval& r) {
                                 return k % 2 == 0 ? r.hi : r.lo;
                               }},
                    rule);
}

double lambda_lo(const LambdaRule& rule) {
  return std::visit(Overloaded{[](const LambdaConstant& r) { return r.lambda; },
                               [](const LambdaInterval& r) { return r.lo; }},
                    rule);
}

double lambda_hi(const LambdaRule& rule) {
  return std::visit(Overloaded{[](const LambdaConstant& r) { return r.lambda; },
                               [](const LambdaInterval& r) { return r.hi; }},
                    rule);
}

double s_upper_bound(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw DomainError("s_upper_bound needs 0 < theta < 1");
  }
  return 2.0 * theta / (1.0 - theta);
}

double beta_at(double lambda, double eta, double mu, double l) {
  if (!(mu > 0.0)) throw DomainError("beta needs mu > 0");
  if (!(lambda > 0.0 && eta > 0.0)) throw DomainError("beta needs lambda, eta > 0");
  const double ll = lambda * l;
  if (ll >= 1.0) throw DomainError("beta needs lambda < 1/L");
  return 1.0 / (1.0 / (1.0 - ll * ll) + 1.0 / (2.0 * lambda * eta * mu));
}

double p_next(double p_prev, double beta) { return p_prev / (1.0 - beta); }

double delta_at(double alpha, double step_norm) {
  return alpha * (1.0 + alpha) * step_norm * step_norm;
}

Schedule::Schedule(ScheduleConfig config, double l_f, double l_h, double mu)
    : config_(std::move(config)), l_f_(l_f), l_h_(l_h), mu_(mu) {
  validate_eta(config_.eta);
  validate_alpha(config_.alpha);
  const double eta0 = initial_eta(config_.eta);
  const double l0 = l_f_ + eta0 * l_h_;
  if (config_.lambda) {
    lambda_ = *config_.lambda;
  } else {
    if (!(l0 > 0.0)) {
      throw ConfigError("cannot default lambda: L_F + eta0 L_H is zero");
    }
    lambda_ = LambdaConstant{kDefaultLambdaFactor / l0};
  }
  const double lo = bivi::lambda_lo(lambda_);
  const double hi = bivi::lambda_hi(lambda_);
  if (!(lo > 0.0 && lo <= hi)) throw DomainError("lambda needs 0 < lo <= hi");

  if (config_.strong_mode) {
    if (!(mu_ > 0.0)) {
      throw DomainError("strong mode needs a strongly monotone H (mu > 0)");
    }
    if (!(hi * l0 < 1.0)) {
      throw DomainError("strong mode needs lambda < 1/(L_F + eta L_H) = " +
                        std::to_string(1.0 / l0));
    }
  } else if (hi * l0 > 1.0) {
    throw DomainError("lambda exceeds 1/(L_F + eta0 L_H) = " +
                      std::to_string(1.0 / l0));
  }
}

double Schedule::beta_bar() const {
  if (!config_.strong_mode || !constant_eta()) {
    throw UnavailableError("constant beta needs strong mode with constant eta");
  }
  const double eta = eta0();
  const double l = l_at(eta);
  const double hi = lambda_hi();
  const double lo = lambda_lo();
  return 1.0 / (1.0 / (1.0 - hi * hi * l * l) + 1.0 / (2.0 * lo * eta * mu_));
}

bool Schedule::alpha_over_eta_nonincreasing() const {
  if (inertia_free() || constant_eta()) return true;
  // Diminishing eta: the pen rule keeps the ratio nonincreasing by
  // construction; fixed alpha sequences do not.
  if (const auto* c = std::get_if<AlphaConstant>(&config_.alpha)) {
    return c->alpha == 0.0;
  }
  return std::holds_alternative<AlphaAdaptivePen>(config_.alpha);
}

namespace {

void fill_strong(ScheduleState& st, const Schedule& sch) {
  st.beta = beta_at(st.lambda, st.eta, sch.mu(), sch.l_at(st.eta));
  st.log_p = st.log_p_prev - std::log1p(-st.beta);
}

}  // namespace

ScheduleState schedule_start(const Schedule& sch) {
  ScheduleState st;
  st.k = 0;
  st.eta = eta_at(sch.config().eta, 0);
  st.eta_prev = st.eta;
  st.alpha = alpha_initial(sch.config().alpha);
  st.alpha_prev = st.alpha;
  st.lambda = lambda_at(sch.lambda_rule(), 0);
  st.log_p_prev = 0.0;
  if (sch.strong_mode()) fill_strong(st, sch);
  st.delta = 0.0;
  return st;
}

void schedule_advance(ScheduleState& st, const Schedule& sch, double step_norm) {
  const long k = st.k + 1;
  const double beta_prev = st.beta;
  st.eta_prev = st.eta;
  st.alpha_prev = st.alpha;
  st.log_p_prev = st.log_p;
  st.k = k;
  st.eta = eta_at(sch.config().eta, k);
  st.lambda = lambda_at(sch.lambda_rule(), k);
  double a = alpha_next(sch.config().alpha, k, st.eta, st.eta_prev,
                        st.alpha_prev, step_norm);
  if (sch.strong_mode()) a = std::min(a, (1.0 - beta_prev) * st.alpha_prev);
  st.alpha = a;
  st.max_ratio_increase =
      std::max(st.max_ratio_increase, st.alpha / st.eta - st.alpha_prev / st.eta_prev);
  if (sch.strong_mode()) fill_strong(st, sch);

  st.delta = delta_at(st.alpha, step_norm);
}

void schedule_commit(ScheduleState& st) {
  st.s.add(st.delta / st.eta);
  st.shat.add(st.delta);
  if (st.delta > 0.0) st.sum_pdelta.add(std::exp(st.log_p_prev + std::log(st.delta)));
}

}  // namespace bivi
