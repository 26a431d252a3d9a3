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

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "bivi/schedule.hpp"
#include "support.hpp"

namespace bivi {
namespace {

TEST(EtaAt, DiminishingValues) {
  const EtaRule r = EtaDiminishing{0.1, 0.5};
  EXPECT_DOUBLE_EQ(eta_at(r, 0), 0.1);
  EXPECT_DOUBLE_EQ(eta_at(r, 3), 0.05);
  EXPECT_NEAR(eta_at(r, 99), 0.01, 1e-17);
  EXPECT_DOUBLE_EQ(eta_at(EtaConstant{0.3}, 1234), 0.3);
  EXPECT_DOUBLE_EQ(initial_eta(r), 0.1);
}

TEST(AlphaNext, PenRuleExample) {
  const AlphaRule r = AlphaAdaptivePen{1, 0.1, 0.0, 0.5};
  // 0.1 * min{0.1 / 1, 0.5 / 0.1} = 0.01
  EXPECT_NEAR(alpha_next(r, 1, 0.1, 0.1, 0.5, 1.0), 0.01, 1e-15);
}

TEST(AlphaNext, PenRuleBeforeSwitchKeepsRatio) {
  const AlphaRule r = AlphaAdaptivePen{5, 0.1, 1e-4, 0.5};
  EXPECT_DOUBLE_EQ(alpha_next(r, 2, 0.1, 0.1, 0.37, 100.0), 0.37);
  // With diminishing eta the ratio alpha/eta is carried over.
  EXPECT_NEAR(alpha_next(r, 2, 0.05, 0.1, 0.4, 1.0), 0.2, 1e-15);
}

TEST(AlphaNext, PenRuleZeroStepWithoutRegularizer) {
  // rho = 0 and a zero step: the penalty term is infinite and the ratio wins.
  const AlphaRule r = AlphaAdaptivePen{0, 0.5, 0.0, 0.5};
  EXPECT_DOUBLE_EQ(alpha_next(r, 3, 0.1, 0.1, 0.4, 0.0), 0.4);
}

TEST(AlphaNext, ZeroAndConstantRules) {
  for (long k = 1; k < 50; ++k) {
    EXPECT_EQ(alpha_next(AlphaZero{}, k, 0.1, 0.1, 0.7, 3.0), 0.0);
    EXPECT_EQ(alpha_next(AlphaConstant{0.5}, k, 0.1, 0.1, 0.5, 3.0), 0.5);
  }
  EXPECT_EQ(alpha_initial(AlphaZero{}), 0.0);
  EXPECT_EQ(alpha_initial(AlphaConstant{0.3}), 0.3);
  EXPECT_EQ(alpha_initial(AlphaAdaptivePen{1, 0.1, 1e-4, 0.25}), 0.25);
}

TEST(AlphaNext, SummableTailStaysInRange) {
  const AlphaRule r = AlphaSummableTail{2, 0.5, 2.0};
  double sum = 0.0;
  for (long k = 1; k < 2000; ++k) {
    const double a = alpha_next(r, k, 0.1, 0.1, 0.5, 1.0);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
    sum += a;
  }
  EXPECT_LT(sum, 0.5 * 2 + 0.5 * M_PI * M_PI / 6.0);
}

TEST(SUpperBound, Values) {
  EXPECT_DOUBLE_EQ(s_upper_bound(0.5), 2.0);
  EXPECT_NEAR(s_upper_bound(0.99), 198.0, 1e-10);
  EXPECT_NEAR(s_upper_bound(1e-12), 0.0, 1e-11);
  EXPECT_THROW(s_upper_bound(1.0), DomainError);
  EXPECT_THROW(s_upper_bound(0.0), DomainError);
}

TEST(BetaAt, Values) {
  EXPECT_NEAR(beta_at(1.0, 0.1, 1.0, 0.2), 1.0 / (1.0 / 0.96 + 5.0), 1e-15);
  EXPECT_NEAR(beta_at(1.0, 0.1, 1.0, 0.2), 0.165517, 1e-6);
  EXPECT_NEAR(beta_at(0.5, 1.0, 1.0, 1.0), 3.0 / 7.0, 1e-15);
  EXPECT_THROW(beta_at(1.0, 0.1, 1.0, 1.0), DomainError);
  EXPECT_THROW(beta_at(1.0, 0.1, 0.0, 0.2), DomainError);
}

TEST(BetaAt, IncreasesTowardOneWithModulus) {
  double prev = 0.0;
  for (double mu : {0.1, 1.0, 10.0, 1e3, 1e6}) {
    const double b = beta_at(1.0, 0.1, mu, 0.0);
    EXPECT_GT(b, prev);
    EXPECT_LT(b, 1.0);
    prev = b;
  }
  EXPECT_NEAR(prev, 1.0, 1e-4);
}

TEST(PNext, Values) {
  double p = 1.0;
  p = p_next(p, 0.5);
  EXPECT_DOUBLE_EQ(p, 2.0);
  p = p_next(p_next(p, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(p, 8.0);
  EXPECT_DOUBLE_EQ(p_next(3.0, 0.0), 3.0);
  EXPECT_NEAR(p_next(1.0, 0.165517), 1.19834, 1e-5);
}

TEST(DeltaAt, Values) {
  EXPECT_DOUBLE_EQ(delta_at(0.5, 2.0), 3.0);
  EXPECT_DOUBLE_EQ(delta_at(0.0, 5.0), 0.0);
  EXPECT_DOUBLE_EQ(delta_at(1.0, 1.0), 2.0);
}

TEST(Schedule, Validation) {
  ScheduleConfig c;
  c.eta = EtaDiminishing{1.5, 0.5};
  EXPECT_THROW(Schedule(c, 1.0, 1.0, 0.0), DomainError);
  c.eta = EtaDiminishing{0.1, 1.0};
  EXPECT_THROW(Schedule(c, 1.0, 1.0, 0.0), DomainError);
  c.eta = EtaConstant{0.1};
  c.lambda = LambdaConstant{1.0};
  // Monotone mode: lambda <= 1/(L_F + eta0 L_H) = 1/0.2.
  EXPECT_NO_THROW(Schedule(c, 0.1, 1.0, 1.0));
  c.lambda = LambdaConstant{5.0};
  EXPECT_NO_THROW(Schedule(c, 0.1, 1.0, 1.0));
  c.lambda = LambdaConstant{5.01};
  EXPECT_THROW(Schedule(c, 0.1, 1.0, 1.0), DomainError);
  // Strong mode is strict and needs mu > 0.
  c.strong_mode = true;
  c.lambda = LambdaConstant{5.0};
  EXPECT_THROW(Schedule(c, 0.1, 1.0, 1.0), DomainError);
  c.lambda = LambdaConstant{1.0};
  EXPECT_THROW(Schedule(c, 0.1, 1.0, 0.0), DomainError);
  EXPECT_NO_THROW(Schedule(c, 0.1, 1.0, 1.0));
  c.alpha = AlphaConstant{1.5};
  EXPECT_THROW(Schedule(c, 0.1, 1.0, 1.0), DomainError);
  c.alpha = AlphaAdaptivePen{1, 1.0, 1e-4, 0.5};
  EXPECT_THROW(Schedule(c, 0.1, 1.0, 1.0), DomainError);
}

TEST(Schedule, DefaultStepsize) {
  ScheduleConfig c;
  c.eta = EtaConstant{0.1};
  const Schedule s(c, 0.1, 1.0, 1.0);
  EXPECT_NEAR(s.lambda_lo(), 0.99 / 0.2, 1e-12);
  EXPECT_THROW(Schedule(c, 0.0, 0.0, 0.0), ConfigError);
}

TEST(Schedule, BetaBarUsesIntervalEnds) {
  ScheduleConfig c;
  c.eta = EtaConstant{0.1};
  c.lambda = LambdaInterval{0.5, 1.0};
  c.strong_mode = true;
  const Schedule s(c, 0.1, 1.0, 1.0);
  const double l = 0.2;
  const double expect = 1.0 / (1.0 / (1.0 - 1.0 * l * l) + 1.0 / (2.0 * 0.5 * 0.1 * 1.0));
  EXPECT_NEAR(s.beta_bar(), expect, 1e-15);
  c.strong_mode = false;
  EXPECT_THROW(Schedule(c, 0.1, 1.0, 1.0).beta_bar(), UnavailableError);
}

TEST(Schedule, IntervalStepsizeAlternates) {
  const LambdaRule r = LambdaInterval{0.25, 0.5};
  EXPECT_EQ(lambda_at(r, 0), 0.5);
  EXPECT_EQ(lambda_at(r, 1), 0.25);
  EXPECT_EQ(lambda_lo(r), 0.25);
  EXPECT_EQ(lambda_hi(r), 0.5);
}

// Drives the schedule with synthetic step norms and checks the sequence
// properties every admissible configuration must have.
void drive(const Schedule& s, long iters, std::uint64_t seed, double max_step,
           const std::function<void(const ScheduleState&, const ScheduleState&)>& check) {
  Rng rng(seed);
  ScheduleState st = schedule_start(s);
  for (long k = 0; k < iters; ++k) {
    const ScheduleState before = st;
    schedule_commit(st);
    schedule_advance(st, s, rng.uniform(0.0, max_step));
    check(before, st);
  }
}

TEST(ScheduleProperty, SequencesAreMonotone) {
  const std::vector<ScheduleConfig> configs = {
      {EtaConstant{0.1}, AlphaConstant{0.5}, LambdaConstant{1.0}, false},
      {EtaDiminishing{0.1, 0.5}, AlphaAdaptivePen{1, 0.1, 1e-4, 0.5}, LambdaConstant{1.0}, false},
      {EtaDiminishing{0.5, 0.3}, AlphaAdaptivePen{3, 0.9, 1e-8, 0.9}, LambdaConstant{1.0}, false},
      {EtaDiminishing{0.1, 0.5}, AlphaZero{}, LambdaConstant{1.0}, false},
      {EtaConstant{0.1}, AlphaAdaptivePen{0, 0.5, 1e-4, 1.0}, LambdaConstant{1.0}, false},
  };
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const Schedule s(configs[i], 0.1, 1.0, 1.0);
    ASSERT_TRUE(s.alpha_over_eta_nonincreasing());
    drive(s, 3000, i, 5.0, [&](const ScheduleState& a, const ScheduleState& b) {
      EXPECT_GE(a.eta, b.eta);
      EXPECT_GE(b.alpha, 0.0);
      EXPECT_LE(b.alpha, 1.0);
      EXPECT_GE(a.alpha / a.eta, b.alpha / b.eta - 1e-12 * (1.0 + a.alpha / a.eta));
    });
  }
}

TEST(ScheduleProperty, PenRuleWithoutDelayBoundsWeightedSum) {
  for (double theta : {0.1, 0.5, 0.9}) {
    ScheduleConfig c{EtaConstant{0.1}, AlphaAdaptivePen{0, theta, 1e-4, 1.0},
                     LambdaConstant{1.0}, false};
    const Schedule s(c, 0.1, 1.0, 1.0);
    const double cap = s_upper_bound(theta);
    drive(s, 10000, 3, 10.0, [&](const ScheduleState&, const ScheduleState& b) {
      EXPECT_LE(b.s.value(), cap + 1e-12);
    });
  }
}

TEST(ScheduleProperty, StrongModeWeightsAreMonotone) {
  ScheduleConfig c{EtaConstant{0.1}, AlphaConstant{0.5}, LambdaConstant{1.0}, true};
  const Schedule s(c, 0.1, 1.0, 1.0);
  drive(s, 300, 4, 3.0, [&](const ScheduleState& a, const ScheduleState& b) {
    // alpha_{k+1} <= (1 - beta_k) alpha_k and p_{k-1} alpha_k nonincreasing.
    EXPECT_LE(b.alpha, (1.0 - a.beta) * a.alpha + 1e-15);
    const double before = std::exp(a.log_p_prev) * a.alpha;
    const double now = std::exp(b.log_p_prev) * b.alpha;
    EXPECT_LE(now, before * (1.0 + 1e-12) + 1e-300);
    EXPECT_NEAR(b.log_p - b.log_p_prev, -std::log1p(-b.beta), 1e-12);
  });
}

TEST(ScheduleState, StartsWithZeroDelta) {
  ScheduleConfig c{EtaConstant{0.1}, AlphaConstant{0.5}, LambdaConstant{1.0}, false};
  const ScheduleState st = schedule_start(Schedule(c, 0.1, 1.0, 1.0));
  EXPECT_EQ(st.delta, 0.0);
  EXPECT_EQ(st.alpha, 0.5);
  EXPECT_EQ(st.s.value(), 0.0);
  EXPECT_EQ(st.log_p_prev, 0.0);
}

TEST(CompensatedSum, BeatsNaiveSummation) {
  CompensatedSum s;
  double naive = 0.0;
  s.add(1.0);
  naive += 1.0;
  for (int i = 0; i < 100000; ++i) {
    s.add(1e-16);
    naive += 1e-16;
  }
  EXPECT_NEAR(s.value(), 1.0 + 1e-11, 1e-15);
  EXPECT_EQ(naive, 1.0);
}

}  // namespace
}  // namespace bivi
