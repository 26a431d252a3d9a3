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

#ifndef BIVI_PROBLEM_HPP_
#define BIVI_PROBLEM_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bivi/common.hpp"
#include "bivi/operator.hpp"
#include "bivi/rng.hpp"
#include "bivi/sets.hpp"

namespace bivi {

// Where a problem constant came from. Bounds built from anything other than
// kSupplied or kExact are indicative rather than certificates.
enum class Provenance { kSupplied, kExact, kEstimated, kPointEstimate, kUnavailable };

std::string_view to_string(Provenance p);

struct Constant {
  std::optional<double> value;
  Provenance source = Provenance::kUnavailable;

  static Constant supplied(double v) { return {v, Provenance::kSupplied}; }
  static Constant exact(double v) { return {v, Provenance::kExact}; }
  static Constant estimated(double v) { return {v, Provenance::kEstimated}; }
  static Constant point_estimate(double v) { return {v, Provenance::kPointEstimate}; }
  static Constant unavailable() { return {}; }

  bool known() const { return value.has_value(); }
  bool certified() const {
    return known() && (source == Provenance::kSupplied || source == Provenance::kExact);
  }
  // Throws UnavailableError naming the constant when unknown.
  double get(std::string_view name) const;
};

// Weak sharpness of the lower-level problem: <F(x), y - x> >= sigma dist(y, Q)^M.
struct Sharpness {
  double sigma = 1.0;
  double m = 1.0;
};

struct ProblemSpec {
  std::string name;
  Operator f;
  Operator h;
  SimpleSet x;
  std::optional<SimpleSet> omega;  // whole space when absent
  Vector initial_point;
  Constant d_x;
  Constant c_h;
  Constant b_h;
  std::optional<Vector> known_solution;
  std::optional<Sharpness> sharpness;
  std::vector<std::string> notes;
  // Radius used when sampling unbounded sets (probes, invariant checks).
  double sample_radius = 10.0;
};

/// Lower-level VI(F, X) and upper-level VI(H, SOL(F, X)).
///
/// Construction checks that F and H have the dimension of X, that the
/// initial point and the known solution lie in X, and that X is contained
/// in Omega on 1000 sampled points of X. Instances are immutable.
class BilevelProblem {
 public:
  explicit BilevelProblem(ProblemSpec spec, std::uint64_t check_seed = 1);

  const std::string& name() const { return spec_.name; }
  Index dim() const { return spec_.x.dim(); }
  const Operator& f() const { return spec_.f; }
  const Operator& h() const { return spec_.h; }
  const SimpleSet& x_set() const { return spec_.x; }
  const SimpleSet& omega() const { return omega_; }
  const Vector& initial_point() const { return spec_.initial_point; }
  const Constant& d_x() const { return spec_.d_x; }
  const Constant& c_h() const { return spec_.c_h; }
  const Constant& b_h() const { return spec_.b_h; }
  const std::optional<Vector>& known_solution() const { return spec_.known_solution; }
  const std::optional<Sharpness>& sharpness() const { return spec_.sharpness; }
  const std::vector<std::string>& notes() const { return spec_.notes; }
  double sample_radius() const { return spec_.sample_radius; }

  double l_f() const { return spec_.f.lipschitz(); }
  double l_h() const { return spec_.h.lipschitz(); }
  double mu() const { return spec_.h.mu(); }

 private:
  ProblemSpec spec_;
  SimpleSet omega_;
};

struct ConstantEstimate {
  Constant d_x;
  Constant c_h;
};

/// D_X and C_H for a bounded X.
///
/// Boxes give D_X exactly (the diagonal). C_H is exact for an affine H on a
/// box of dimension <= 16 (max of a convex function over the vertices) and
/// for H = 0; otherwise both are sampled maxima, which underestimate the
/// suprema. Unbounded X yields unavailable constants.
ConstantEstimate estimate_constants(const BilevelProblem& problem, int samples,
                                    std::uint64_t seed = 7);

struct ProbeResult {
  int pairs = 0;
  double min_monotone = 0.0;       // min <G(x)-G(y), x-y>
  double min_strong_excess = 0.0;  // min <G(x)-G(y), x-y> - mu |x-y|^2
  double max_lipschitz_ratio = 0.0;
  bool monotone = true;
  bool strongly_monotone = true;
  bool lipschitz = true;
};

/// Random-pair probe of monotonicity, strong monotonicity with op.mu() and
/// the Lipschitz constant op.lipschitz() on points of `domain`.
ProbeResult probe_operator(const Operator& op, const SimpleSet& domain,
                           int pairs, Rng& rng, double radius = 10.0);

}  // namespace bivi

#endif  // BIVI_PROBLEM_HPP_
