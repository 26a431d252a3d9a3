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

#ifndef BIVI_DIAGNOSTICS_HPP_
#define BIVI_DIAGNOSTICS_HPP_

#include <cstdint>
#include <optional>
#include <string_view>

#include "bivi/common.hpp"
#include "bivi/problem.hpp"

namespace bivi {

enum class GapMethod { kExactAffine, kSampled };
std::string_view to_string(GapMethod m);
GapMethod parse_gap_method(std::string_view text);

struct GapOptions {
  int samples = 1000;          // sampled method
  std::uint64_t seed = 11;     // sampled method
  double stationarity = 1e-9;  // exact method, on the ascent step length
  long max_steps = 100000;
};

struct GapResult {
  double value = 0.0;
  GapMethod method = GapMethod::kExactAffine;
  // True when value only lower-bounds the gap (sampled method, or ascent
  // stopped by the step cap).
  bool lower_bound = false;
  long steps = 0;
};

/// Gap(z, F, X) = sup_{x in X} <F(x), z - x>.
///
/// Exact mode needs an affine F and a box or polyhedron X. The objective is
/// concave since sym(A) is PSD; linear objectives on a box are maximised in
/// closed form, everything else by projected gradient ascent from z with
/// step 1/|A + A^T|. Sampled mode maximises over random points of X and is
/// labeled a lower bound. Throws DomainError if z is not in X, and
/// UnavailableError when exact mode does not apply.
GapResult gap_fx(const Vector& z, const BilevelProblem& problem, GapMethod method,
                 const GapOptions& options = {});

/// <H(x*), z - x*>, a lower bound on Gap(z, H, Q) since x* is in Q.
/// Throws UnavailableError without a known solution.
double gap_hq_surrogate(const Vector& z, const BilevelProblem& problem);

/// |max(0, -y)|^2 + |max(0, -F(y))|^2 + |y^T F(y)|.
double infeasibility_phi(const Vector& y, const Operator& f);

/// Constants shared by the bound formulas. `eta` is eta0 for diminishing
/// schedules and the constant value otherwise.
struct BoundConstants {
  double d_x = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double eta = 0.0;
  double b = 0.5;
  double c_h = 0.0;
};

// Diminishing eta_k = eta0/(k+1)^b.
//   optimality:  D^2/(2^{1-b} lambda_lo eta0 k^{1-b}) + s/(2 lambda_lo k)
//   feasibility: (D^2 + s)/(2 lambda_lo k)
//                + eta0 lambda_hi C_H D / ((1-b) lambda_lo k^b)
double bound_optimality_diminishing(long k, const BoundConstants& c, double s);
double bound_feasibility_diminishing(long k, const BoundConstants& c, double s);

// Constant eta.
//   optimality:  (D^2 + shat)/(2 lambda_lo eta k)
//   feasibility: (D^2 + shat)/(2 lambda_lo k) + eta lambda_hi C_H D / lambda_lo
double bound_optimality_constant(long k, const BoundConstants& c, double shat);
double bound_feasibility_constant(long k, const BoundConstants& c, double shat);

/// -(B_H / sigma^{1/M}) v^{1/M}, the lower bound on Gap(y, H, Q) implied by a
/// feasibility bound v under weak sharpness.
double weak_sharp_lower_bound(double v, double b_h, double sigma, double m);

/// eta = eps / (2 D0).
double recommended_eta(double eps, double d0);

/// max{ceil(D0 (D^2 + shat) / (lambda_lo eps^2)), ceil((D^2 + shat)/(lambda_lo eps))}.
/// `d0_floor` is lambda_hi C_H D / lambda_lo; D0 below it throws DomainError.
long threshold_constant_eta(double eps, double d0, double d_x, double shat,
                            double lambda_lo, std::optional<double> d0_floor = {});

// Strong monotonicity, constant eta, beta from the interval ends.
//   general:      (1-beta)^k/(2 lambda_lo eta) (D^2 + sum p_{j-1} delta_j)
//   no inertia:   (1-beta)^k D^2/(2 lambda_lo eta)
//   closed form:  (k+1)(1-beta)^k D^2/(lambda_lo eta)
double strong_bound_optimality(long k, const BoundConstants& c, double beta,
                               double sum_pdelta);
double strong_bound_optimality_no_inertia(long k, const BoundConstants& c, double beta);
double strong_bound_optimality_closed(long k, const BoundConstants& c, double beta);

//   general:      (1-beta)^k/(2 lambda_lo) (D^2 + sum) + eta lambda_hi C_H D/lambda_lo
//   closed form:  (k+1)(1-beta)^k D^2/lambda_lo + eta lambda_hi C_H D/lambda_lo
double strong_bound_feasibility(long k, const BoundConstants& c, double beta,
                                double sum_pdelta);
double strong_bound_feasibility_closed(long k, const BoundConstants& c, double beta);

struct StrongThresholdInput {
  double eps = 0.0;
  double d_x = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double l = 0.0;    // L_F + eta L_H
  double mu = 0.0;
  double eta = 0.0;  // regularisation used for the optimality threshold
  double d0 = 0.0;   // feasibility and joint thresholds
};

struct StrongThresholds {
  long k_opt = 0;
  std::optional<long> k_feas;   // needs d0 > 0
  std::optional<long> k_joint;  // needs d0 > eps
};

/// Smallest k >= 1 with k >= ceil(coef * log(g(k))) for each of
///   opt:   coef = 1/(1 - lambda_hi^2 L^2) + 1/(2 lambda_lo eta mu),
///          g = (k+1) D^2/(lambda_lo eta eps)
///   feas:  coef = 1/(1 - lambda_hi^2 L^2) + D0/(lambda_lo mu eps),
///          g = 2 (k+1) D^2/(lambda_lo eps)
///   joint: same coef, g = 2 (k+1) D^2 D0/(lambda_lo eps^2)
/// found by iterating k <- ceil(coef log g(k)) from k = 1; the right side is
/// increasing and logarithmic so the iteration stops at the least solution.
StrongThresholds strong_thresholds(const StrongThresholdInput& in);

/// Least k >= 1 with k >= ceil(coef * log(scale * (k+1))).
long self_referential_threshold(double coef, double scale);

/// min{a s^2 + b t^2 : s, t >= 0, s + t >= c} = a b c^2 / (a + b).
double lemma_min(double a, double b, double c);

enum class BoundName {
  kOptimalityDiminishing,
  kFeasibilityDiminishing,
  kOptimalityConstant,
  kFeasibilityConstant,
  kStrongOptimality,
  kStrongOptimalityNoInertia,
  kStrongOptimalityClosed,
  kStrongFeasibility,
  kStrongFeasibilityClosed,
};

std::string_view to_string(BoundName name);

struct BoundReport {
  long k = 0;
  BoundName name = BoundName::kOptimalityConstant;
  double value = 0.0;
  std::optional<double> measured;
  bool certified = false;  // every constant supplied or exact
  double tolerance = 1e-6;
  bool holds() const { return !measured || *measured <= value + tolerance; }
  double slack() const { return measured ? value - *measured : value; }
};

}  // namespace bivi

#endif  // BIVI_DIAGNOSTICS_HPP_
