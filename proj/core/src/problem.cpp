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

#include "bivi/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace bivi {
namespace {

constexpr int kSubsetSamples = 1000;
constexpr double kMemberTol = 1e-10;
constexpr Index kMaxVertexDim = 16;

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kSupplied:
      return "supplied";
    case Provenance::kExact:
      return "exact";
    case Provenance::kEstimated:
      return "estimated";
    case Provenance::kPointEstimate:
      return "point-estimate";
    case Provenance::kUnavailable:
      return "unavailable";
  }
  return "unknown";
}

double Constant::get(std::string_view name) const {
  if (!value) throw UnavailableError(std::string(name) + " is not available");
  return *value;
}

BilevelProblem::BilevelProblem(ProblemSpec spec, std::uint64_t check_seed)
    : spec_(std::move(spec)),
      omega_(spec_.omega ? *spec_.omega : SimpleSet::whole_space(spec_.x.dim())) {
  const Index n = spec_.x.dim();
  require_dim(spec_.f.dim(), n, "lower-level operator F");
  require_dim(spec_.h.dim(), n, "upper-level operator H");
  require_dim(omega_.dim(), n, "safeguard set Omega");
  require_dim(spec_.initial_point.size(), n, "initial point");
  if (!spec_.x.contains(spec_.initial_point, 1e-9)) {
    throw DomainError("initial point is not in X");
  }
  if (spec_.known_solution) {
    require_dim(spec_.known_solution->size(), n, "known solution");
    if (!spec_.x.contains(*spec_.known_solution, kMemberTol)) {
      throw DomainError("known solution is not in X");
    }
  }
  if (spec_.sharpness &&
      (spec_.sharpness->sigma <= 0.0 || spec_.sharpness->m < 1.0)) {
    throw DomainError("sharpness needs sigma > 0 and M >= 1");
  }
  if (!omega_.is_whole_space()) {
    Rng rng(check_seed);
    for (int i = 0; i < kSubsetSamples; ++i) {
      const Vector p = spec_.x.sample(rng, spec_.sample_radius);
      if ((omega_.project(p) - p).norm() > kMemberTol * std::max(1.0, p.norm())) {
        throw DomainError("X is not contained in Omega");
      }
    }
  }
}

ConstantEstimate estimate_constants(const BilevelProblem& problem, int samples,
                                    std::uint64_t seed) {
  if (samples < 1) throw DomainError("estimate_constants: samples must be >= 1");
  const SimpleSet& x = problem.x_set();
  if (!x.is_bounded()) return {Constant::unavailable(), Constant::unavailable()};

  ConstantEstimate out;
  const Operator& h = problem.h();
  const auto bbox = x.bounding_box();
  const bool is_box = std::holds_alternative<Box>(x.shape()) ||
                      std::holds_alternative<Singleton>(x.shape());

  if (is_box) {
    out.d_x = Constant::exact((bbox->second - bbox->first).norm());
  }
  if (h.is_affine() && h.matrix().isZero(0.0) && h.offset().isZero(0.0)) {
    out.c_h = Constant::exact(0.0);
  } else if (is_box && h.is_affine() && x.dim() <= kMaxVertexDim) {
    const Index n = x.dim();
    double best = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      Vector v(n);
      for (Index i = 0; i < n; ++i) {
        v[i] = (mask >> i) & 1 ? bbox->second[i] : bbox->first[i];
      }
      best = std::max(best, h(v).norm());
    }
    out.c_h = Constant::exact(best);
  }

  if (out.d_x.known() && out.c_h.known()) return out;

  Rng rng(seed);
  std::vector<Vector> pts;
  pts.reserve(samples);
  for (int i = 0; i < samples; ++i) pts.push_back(x.sample(rng, problem.sample_radius()));
  if (!out.d_x.known()) {
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        d = std::max(d, (pts[i] - pts[j]).norm());
      }
    }
    out.d_x = Constant::estimated(d);
  }
  if (!out.c_h.known()) {
    double c = 0.0;
    for (const Vector& p : pts) c = std::max(c, h(p).norm());
    out.c_h = Constant::estimated(c);
  }
  return out;
}

ProbeResult probe_operator(const Operator& op, const SimpleSet& domain,
                           int pairs, Rng& rng, double radius) {
  ProbeResult r;
  r.pairs = pairs;
  r.min_monotone = std::numeric_limits<double>::infinity();
  r.min_strong_excess = std::numeric_limits<double>::infinity();
  for (int i = 0; i < pairs; ++i) {
    const Vector a = domain.sample(rng, radius);
    const Vector b = domain.sample(rng, radius);
    const Vector d = a - b;
    const Vector g = op(a) - op(b);
    const double inner = g.dot(d);
    const double d2 = d.squaredNorm();
    r.min_monotone = std::min(r.min_monotone, inner);
    r.min_strong_excess = std::min(r.min_strong_excess, inner - op.mu() * d2);
    if (d2 > 0.0) {
      r.max_lipschitz_ratio = std::max(r.max_lipschitz_ratio, g.norm() / std::sqrt(d2));
    }
    // Absolute floors scaled by |g||d| to absorb rounding in the inner product.
    const double scale = 1.0 + g.norm() * std::sqrt(d2);
    if (inner < -1e-10 * scale) r.monotone = false;
    if (inner < op.mu() * d2 - 1e-8 * scale) r.strongly_monotone = false;
    if (g.norm() > (op.lipschitz() + 1e-8) * std::sqrt(d2)) r.lipschitz = false;
  }
  return r;
}

}  // namespace bivi
