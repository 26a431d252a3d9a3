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

#include "bivi/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bivi/rng.hpp"

namespace bivi {
namespace {

constexpr double kMemberTol = 1e-9;
constexpr double kConcavityFloor = -1e-10;
constexpr double kSnapTol = 16 * std::numeric_limits<double>::epsilon();

void require_k(long k) {
  if (k < 1) throw DomainError("bounds are stated for k >= 1");
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw DomainError(std::string(what) + " must be > 0");
}

double psi(const Operator& f, const Vector& x, const Vector& z) {
  return f(x).dot(z - x);
}

// Ceiling that treats values within a few ulps of an integer as that
// integer, so 1/0.01^2 = 10000.000000000002 does not become 10001.
long snapped_ceil(double v) {
  const double r = std::round(v);
  if (std::abs(v - r) <= kSnapTol * std::max(1.0, std::abs(v))) return static_cast<long>(r);
  return static_cast<long>(std::ceil(v));
}

}  // namespace

std::string_view to_string(GapMethod m) {
  return m == GapMethod::kExactAffine ? "exact-affine" : "sampled";
}

GapMethod parse_gap_method(std::string_view text) {
  if (text == "exact-affine" || text == "exact") return GapMethod::kExactAffine;
  if (text == "sampled") return GapMethod::kSampled;
  throw ConfigError("unknown gap method '" + std::string(text) + "'");
}

GapResult gap_fx(const Vector& z, const BilevelProblem& problem, GapMethod method,
                 const GapOptions& options) {
  const SimpleSet& x_set = problem.x_set();
  require_dim(z.size(), x_set.dim(), "gap point");
  if (!x_set.contains(z, kMemberTol)) {
    throw DomainError("Gap(z, F, X) is only evaluated for z in X");
  }
  const Operator& f = problem.f();
  GapResult out;
  out.method = method;

  if (method == GapMethod::kSampled) {
    Rng rng(options.seed);
    double best = 0.0;  // x = z gives 0
    for (int i = 0; i < options.samples; ++i) {
      best = std::max(best, psi(f, x_set.sample(rng, problem.sample_radius()), z));
    }
    out.value = best;
    out.lower_bound = true;
    out.steps = options.samples;
    return out;
  }

  if (!f.is_affine()) throw UnavailableError("exact gap needs an affine F");
  const bool is_box = std::holds_alternative<Box>(x_set.shape());
  const bool is_poly = std::holds_alternative<Polyhedron>(x_set.shape());
  if (!is_box && !is_poly) {
    throw UnavailableError("exact gap needs a box or polyhedral X");
  }
  if (f.sym_min_eigenvalue() < kConcavityFloor) {
    throw UnavailableError("gap objective is not concave; exact mode refused");
  }

  const Matrix& a = f.matrix();
  const Vector& b = f.offset();
  // grad psi(x) = A^T z - (A + A^T) x - b
  const Vector atz_minus_b = a.transpose() * z - b;
  const double curvature = 2.0 * f.sym_norm();

  if (curvature == 0.0) {
    if (!is_box) throw UnavailableError("linear gap objective over a polyhedron");
    const Box& box = std::get<Box>(x_set.shape());
    Vector x(z.size());
    for (Index i = 0; i < z.size(); ++i) {
      x[i] = atz_minus_b[i] >= 0.0 ? box.hi[i] : box.lo[i];
    }
    out.value = std::max(0.0, psi(f, x, z));
    return out;
  }

  const Matrix a_plus_at = a + a.transpose();
  const double step = 1.0 / curvature;
  Vector x = z;
  double best = 0.0;
  out.lower_bound = true;
  for (long t = 1; t <= options.max_steps; ++t) {
    const Vector grad = atz_minus_b - a_plus_at * x;
    Vector next = x_set.project(x + step * grad);
    const double moved = (next - x).norm();
    x = std::move(next);
    best = std::max(best, psi(f, x, z));
    out.steps = t;
    if (moved <= options.stationarity * std::max(1.0, x.norm())) {
      out.lower_bound = false;
      break;
    }
  }
  out.value = best;
  return out;
}

double gap_hq_surrogate(const Vector& z, const BilevelProblem& problem) {
  if (!problem.known_solution()) {
    throw UnavailableError("surrogate gap needs a known solution");
  }
  const Vector& xs = *problem.known_solution();
  require_dim(z.size(), xs.size(), "surrogate gap point");
  return problem.h()(xs).dot(z - xs);
}

double infeasibility_phi(const Vector& y, const Operator& f) {
  const Vector fy = f(y);
  return (-y).cwiseMax(0.0).squaredNorm() + (-fy).cwiseMax(0.0).squaredNorm() +
         std::abs(y.dot(fy));
}

double bound_optimality_diminishing(long k, const BoundConstants& c, double s) {
  require_k(k);
  require_positive(c.lambda_lo, "lambda_lo");
  require_positive(c.eta, "eta0");
  const double kd = static_cast<double>(k);
  return c.d_x * c.d_x / (std::pow(2.0, 1.0 - c.b) * c.lambda_lo * c.eta) /
             std::pow(kd, 1.0 - c.b) +
         s / (2.0 * c.lambda_lo) / kd;
}

double bound_feasibility_diminishing(long k, const BoundConstants& c, double s) {
  require_k(k);
  require_positive(c.lambda_lo, "lambda_lo");
  const double kd = static_cast<double>(k);
  return (c.d_x * c.d_x + s) / (2.0 * c.lambda_lo) / kd +
         c.eta * c.lambda_hi * c.c_h * c.d_x / ((1.0 - c.b) * c.lambda_lo) /
             std::pow(kd, c.b);
}

double bound_optimality_constant(long k, const BoundConstants& c, double shat) {
  require_k(k);
  require_positive(c.lambda_lo, "lambda_lo");
  require_positive(c.eta, "eta");
  return (c.d_x * c.d_x + shat) / (2.0 * c.lambda_lo * c.eta) / static_cast<double>(k);
}

double bound_feasibility_constant(long k, const BoundConstants& c, double shat) {
  require_k(k);
  require_positive(c.lambda_lo, "lambda_lo");
  return (c.d_x * c.d_x + shat) / (2.0 * c.lambda_lo) / static_cast<double>(k) +
         c.eta * c.lambda_hi * c.c_h * c.d_x / c.lambda_lo;
}

double weak_sharp_lower_bound(double v, double b_h, double sigma, double m) {
  if (!(sigma > 0.0)) throw DomainError("weak sharpness needs sigma > 0");
  if (!(m >= 1.0)) throw DomainError("weak sharpness needs M >= 1");
  if (v < 0.0) throw DomainError("feasibility bound must be >= 0");
  return -(b_h / std::pow(sigma, 1.0 / m)) * std::pow(v, 1.0 / m);
}

double recommended_eta(double eps, double d0) {
  require_positive(eps, "eps");
  require_positive(d0, "D0");
  return eps / (2.0 * d0);
}

long threshold_constant_eta(double eps, double d0, double d_x, double shat,
                            double lambda_lo, std::optional<double> d0_floor) {
  require_positive(eps, "eps");
  require_positive(d0, "D0");
  require_positive(lambda_lo, "lambda_lo");
  if (d0_floor && d0 < *d0_floor) {
    throw DomainError("D0 = " + std::to_string(d0) +
                      " is below lambda_hi C_H D_X / lambda_lo = " +
                      std::to_string(*d0_floor));
  }
  const double mass = (d_x * d_x + shat) / lambda_lo;
  const long a = snapped_ceil(d0 * mass / (eps * eps));
  const long b = snapped_ceil(mass / eps);
  return std::max({a, b, 1L});
}

double strong_bound_optimality(long k, const BoundConstants& c, double beta,
                               double sum_pdelta) {
  require_k(k);
  require_positive(c.lambda_lo, "lambda_lo");
  require_positive(c.eta, "eta");
  return std::pow(1.0 - beta, static_cast<double>(k)) / (2.0 * c.lambda_lo * c.eta) *
         (c.d_x * c.d_x + sum_pdelta);
}

double strong_bound_optimality_no_inertia(long k, const BoundConstants& c, double beta) {
  return strong_bound_optimality(k, c, beta, 0.0);
}

double strong_bound_optimality_closed(long k, const BoundConstants& c, double beta) {
  require_k(k);
  require_positive(c.lambda_lo, "lambda_lo");
  require_positive(c.eta, "eta");
  const double kd = static_cast<double>(k);
  return (kd + 1.0) * std::pow(1.0 - beta, kd) * c.d_x * c.d_x / (c.lambda_lo * c.eta);
}

double strong_bound_feasibility(long k, const BoundConstants& c, double beta,
                                double sum_pdelta) {
  require_k(k);
  require_positive(c.lambda_lo, "lambda_lo");
  return std::pow(1.0 - beta, static_cast<double>(k)) / (2.0 * c.lambda_lo) *
             (c.d_x * c.d_x + sum_pdelta) +
         c.eta * c.lambda_hi * c.c_h * c.d_x / c.lambda_lo;
}

double strong_bound_feasibility_closed(long k, const BoundConstants& c, double beta) {
  require_k(k);
  require_positive(c.lambda_lo, "lambda_lo");
  const double kd = static_cast<double>(k);
  return (kd + 1.0) * std::pow(1.0 - beta, kd) * c.d_x * c.d_x / c.lambda_lo +
         c.eta * c.lambda_hi * c.c_h * c.d_x / c.lambda_lo;
}

long self_referential_threshold(double coef, double scale) {
  require_positive(coef, "threshold coefficient");
  require_positive(scale, "threshold scale");
  long k = 1;
  for (int guard = 0; guard < 10000; ++guard) {
    const double rhs = coef * std::log(scale * (static_cast<double>(k) + 1.0));
    const long need = rhs <= 0.0 ? 1 : static_cast<long>(std::ceil(rhs));
    if (k >= need) return k;
    k = need;
  }
  throw DomainError("threshold iteration did not settle");
}

StrongThresholds strong_thresholds(const StrongThresholdInput& in) {
  require_positive(in.eps, "eps");
  require_positive(in.lambda_lo, "lambda_lo");
  require_positive(in.mu, "mu");
  require_positive(in.eta, "eta");
  const double ll = in.lambda_hi * in.l;
  if (!(ll < 1.0)) throw DomainError("thresholds need lambda_hi L < 1");
  const double base = 1.0 / (1.0 - ll * ll);
  const double d2 = in.d_x * in.d_x;

  StrongThresholds out;
  const double opt_coef = base + 1.0 / (2.0 * in.lambda_lo * in.eta * in.mu);
  out.k_opt = self_referential_threshold(opt_coef, d2 / (in.lambda_lo * in.eta * in.eps));
  if (in.d0 > 0.0) {
    const double coef = base + in.d0 / (in.lambda_lo * in.mu * in.eps);
    out.k_feas = self_referential_threshold(coef, 2.0 * d2 / (in.lambda_lo * in.eps));
    if (in.d0 > in.eps) {
      out.k_joint = self_referential_threshold(
          coef, 2.0 * d2 * in.d0 / (in.lambda_lo * in.eps * in.eps));
    }
  }
  return out;
}

double lemma_min(double a, double b, double c) {
  if (a < 0.0 || b < 0.0 || c < 0.0) throw DomainError("lemma_min needs a, b, c >= 0");
  if (a + b == 0.0) throw DomainError("lemma_min needs a + b > 0");
  return a * b / (a + b) * c * c;
}

std::string_view to_string(BoundName name) {
  switch (name) {
    case BoundName::kOptimalityDiminishing:
      return "opt_dim";
    case BoundName::kFeasibilityDiminishing:
      return "feas_dim";
    case BoundName::kOptimalityConstant:
      return "opt_const";
    case BoundName::kFeasibilityConstant:
      return "feas_const";
    case BoundName::kStrongOptimality:
      return "opt_strong";
    case BoundName::kStrongOptimalityNoInertia:
      return "opt_strong_noinertia";
    case BoundName::kStrongOptimalityClosed:
      return "opt_strong_closed";
    case BoundName::kStrongFeasibility:
      return "feas_strong";
    case BoundName::kStrongFeasibilityClosed:
      return "feas_strong_closed";
  }
  return "unknown";
}

}  // namespace bivi
