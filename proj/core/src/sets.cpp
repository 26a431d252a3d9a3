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

#include "bivi/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/QR>

namespace bivi {
namespace {

constexpr double kFeasTol = 1e-8;
constexpr int kRecessionProbes = 64;
constexpr std::uint64_t kRecessionSeed = 0x5eed'b0ddULL;

// Lawson-Hanson nonnegative least squares: min |A x - b| subject to x >= 0.
Vector nnls(const Matrix& a, const Vector& b) {
  const Index n = a.cols();
  Vector x = Vector::Zero(n);
  std::vector<bool> passive(n, false);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     std::max<double>(a.rows(), n) * std::max(1.0, a.cwiseAbs().maxCoeff());
  auto passive_solve = [&](Vector& s) {
    std::vector<Index> idx;
    for (Index i = 0; i < n; ++i) {
      if (passive[i]) idx.push_back(i);
    }
    Matrix ap(a.rows(), static_cast<Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) ap.col(static_cast<Index>(c)) = a.col(idx[c]);
    const Vector sp = Eigen::CompleteOrthogonalDecomposition<Matrix>(ap).solve(b);
    s.setZero(n);
    for (std::size_t c = 0; c < idx.size(); ++c) s[idx[c]] = sp[static_cast<Index>(c)];
  };
  const int max_outer = 3 * static_cast<int>(n) + 10;
  for (int outer = 0; outer < max_outer; ++outer) {
    const Vector w = a.transpose() * (b - a * x);
    Index j = -1;
    double best = tol;
    for (Index i = 0; i < n; ++i) {
      if (!passive[i] && w[i] > best) {
        best = w[i];
        j = i;
      }
    }
    if (j < 0) break;
    passive[j] = true;
    Vector s;
    for (int inner = 0; inner <= n; ++inner) {
      passive_solve(s);
      double step = 1.0;
      bool clipped = false;
      for (Index i = 0; i < n; ++i) {
        if (passive[i] && s[i] <= 0.0) {
          clipped = true;
          step = std::min(step, x[i] / (x[i] - s[i]));
        }
      }
      if (!clipped) break;
      x += step * (s - x);
      for (Index i = 0; i < n; ++i) {
        if (passive[i] && x[i] <= tol) {
          passive[i] = false;
          x[i] = 0.0;
        }
      }
    }
    for (Index i = 0; i < n; ++i) x[i] = passive[i] ? s[i] : 0.0;
  }
  return x;
}

// The active constraints as rows of A z <= c, coordinates z_j >= 0 written
// as -z_j <= 0.
void active_system(const Polyhedron& p, Index n, const std::vector<Index>& rows,
                   const std::vector<Index>& coords, Matrix& a, Vector& c) {
  const Index k = static_cast<Index>(rows.size() + coords.size());
  a.setZero(k, n);
  c.setZero(k);
  Index r = 0;
  for (Index i : rows) {
    a.row(r) = p.e.row(i);
    c[r++] = p.f[i];
  }
  for (Index j : coords) a(r++, j) = -1.0;
}

// Feasible for every constraint of p up to rounding.
bool nearly_holds(const Polyhedron& p, const Vector& z, double scale) {
  if (p.e.rows() > 0 && ((p.e * z - p.f).array() > 1e-12 * scale).any()) return false;
  return !(p.nonneg && (z.array() < -1e-12 * scale).any());
}

// Exact projection onto the face where the active constraints hold with
// equality, kept only if the KKT conditions of the full problem hold:
// feasibility and nonnegative multipliers.
std::optional<Vector> polish_face(const Polyhedron& p, const Vector& x0,
                                  const std::vector<Index>& rows,
                                  const std::vector<Index>& coords) {
  const Index n = x0.size();
  if (rows.empty() && coords.empty()) return std::nullopt;
  Matrix a;
  Vector c;
  active_system(p, n, rows, coords, a, c);
  const Vector mu = Eigen::CompleteOrthogonalDecomposition<Matrix>(a * a.transpose()).solve(a * x0 - c);
  const double scale = std::max(1.0, x0.norm());
  if ((mu.array() < -1e-12 * scale).any()) return std::nullopt;
  Vector z = x0 - a.transpose() * mu;
  // A singular Gram matrix with an inconsistent right-hand side fails here.
  if ((a * z - c).cwiseAbs().maxCoeff() > 1e-10 * scale) return std::nullopt;
  if (!nearly_holds(p, z, scale)) return std::nullopt;
  if (p.nonneg) z = z.cwiseMax(0.0);
  return z;
}

// Least-distance projection onto the active constraints alone, as
// inequalities, by the Lawson-Hanson reduction to NNLS. Fewer constraints
// give a larger set, so a result that satisfies all of p is the projection
// onto p. Handles degenerate vertices where the face solve cannot certify
// its multipliers.
std::optional<Vector> polish_ldp(const Polyhedron& p, const Vector& x0,
                                 const std::vector<Index>& rows,
                                 const std::vector<Index>& coords) {
  const Index n = x0.size();
  if (rows.empty() && coords.empty()) return std::nullopt;
  Matrix a;
  Vector c;
  active_system(p, n, rows, coords, a, c);
  // u = z - x0 solves min |u| s.t. -A u >= -(c - A x0).
  const Vector w = c - a * x0;
  Matrix e(n + 1, a.rows());
  e.topRows(n) = -a.transpose();
  e.row(n) = -w.transpose();
  Vector f = Vector::Zero(n + 1);
  f[n] = 1.0;
  const Vector sol = nnls(e, f);
  const Vector r = e * sol - f;
  if (!(std::abs(r[n]) > 1e-14)) return std::nullopt;
  Vector z = x0 - r.head(n) / r[n];
  const double scale = std::max(1.0, x0.norm());
  if (!nearly_holds(p, z, scale)) return std::nullopt;
  // The reduction loses a few digits; the face picked out by the positive
  // NNLS weights is solved again exactly when its KKT check passes.
  std::vector<Index> face_rows, face_coords;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (sol[static_cast<Index>(i)] > 0.0) face_rows.push_back(rows[i]);
  }
  for (std::size_t j = 0; j < coords.size(); ++j) {
    if (sol[static_cast<Index>(rows.size() + j)] > 0.0) face_coords.push_back(coords[j]);
  }
  if (auto exact = polish_face(p, x0, face_rows, face_coords)) return exact;
  if (p.nonneg) z = z.cwiseMax(0.0);
  return z;
}

// Dykstra's cyclic projection over the halfspaces and the orthant. Once the
// set of active constraints is the same for two consecutive sweeps the
// projection onto that face is tried and accepted when it passes the KKT
// check, which removes the slow tail of the cyclic scheme.
Vector dykstra(const Polyhedron& p, const Vector& x0,
               const ProjectionOptions& opt) {
  const Index m = p.e.rows();
  const Index n = p.e.cols();
  Vector row_norm2(m);
  for (Index i = 0; i < m; ++i) row_norm2[i] = p.e.row(i).squaredNorm();

  Vector x = x0;
  Vector q = Vector::Zero(m);  // halfspace correction = q_i * E_i
  Vector r = Vector::Zero(p.nonneg ? n : 0);
  std::vector<Index> rows, coords, prev_rows, prev_coords, tried_rows, tried_coords;
  bool tried = false;
  double change = 0.0;
  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    change = 0.0;
    for (Index i = 0; i < m; ++i) {
      if (row_norm2[i] == 0.0) {
        if (p.f[i] < 0.0) throw DomainError("polyhedron row with E_i = 0 and f_i < 0");
        continue;
      }
      const double az = p.e.row(i).dot(x) + q[i] * row_norm2[i];
      const double q_new = std::max(0.0, (az - p.f[i]) / row_norm2[i]);
      const double dq = q_new - q[i];
      if (dq != 0.0) x.noalias() -= dq * p.e.row(i).transpose();
      change += dq * dq * row_norm2[i];
      q[i] = q_new;
    }
    if (p.nonneg) {
      for (Index j = 0; j < n; ++j) {
        const double z = x[j] + r[j];
        const double xn = std::max(z, 0.0);
        const double rn = z - xn;
        change += (rn - r[j]) * (rn - r[j]);
        r[j] = rn;
        x[j] = xn;
      }
    }
    const double scale = std::max(1.0, x.squaredNorm());
    const bool converged = change <= opt.tol * opt.tol * scale;

    rows.clear();
    coords.clear();
    for (Index i = 0; i < m; ++i) {
      if (q[i] > 0.0) rows.push_back(i);
    }
    for (Index j = 0; j < r.size(); ++j) {
      if (r[j] < 0.0) coords.push_back(j);
    }
    const bool stable = sweep > 1 && rows == prev_rows && coords == prev_coords;
    const bool fresh = !tried || rows != tried_rows || coords != tried_coords;
    if ((stable || converged) && fresh) {
      tried = true;
      tried_rows = rows;
      tried_coords = coords;
      if (auto z = polish_face(p, x0, rows, coords)) return *z;
      if (auto z = polish_ldp(p, x0, rows, coords)) return *z;
    }
    if (converged) return x;
    prev_rows.swap(rows);
    prev_coords.swap(coords);
  }
  throw ProjectionError(
      "polyhedral projection did not converge in " +
          std::to_string(opt.max_sweeps) + " sweeps (residual " +
          std::to_string(std::sqrt(change)) + ")",
      std::sqrt(change), opt.max_sweeps);
}

bool polyhedron_holds(const Polyhedron& p, const Vector& x) {
  if (p.e.rows() > 0 && ((p.e * x - p.f).array() > kFeasTol).any()) return false;
  if (p.nonneg && (x.array() < -kFeasTol).any()) return false;
  return true;
}

}  // namespace

Vector halfspace_project(const Vector& a, double c, const Vector& x) {
  require_dim(x.size(), a.size(), "halfspace_project");
  const double a2 = a.squaredNorm();
  if (a2 == 0.0) throw DomainError("halfspace_project: normal vector is zero");
  const double ax = a.dot(x);
  if (ax <= c) return x;
  return x - ((ax - c) / a2) * a;
}

SimpleSet SimpleSet::whole_space(Index n) {
  SimpleSet s(WholeSpace{n}, n);
  s.anchor_ = Vector::Zero(n);
  return s;
}

SimpleSet SimpleSet::box(Vector lo, Vector hi) {
  require_dim(hi.size(), lo.size(), "box bounds");
  if ((lo.array() > hi.array()).any()) {
    throw DomainError("box: lower bound exceeds upper bound");
  }
  if (!lo.allFinite() || !hi.allFinite()) {
    throw DomainError("box: bounds must be finite");
  }
  const Index n = lo.size();
  SimpleSet s(Box{lo, hi}, n);
  s.bounded_ = true;
  s.anchor_ = 0.5 * (lo + hi);
  s.bbox_ = std::make_pair(std::move(lo), std::move(hi));
  return s;
}

SimpleSet SimpleSet::orthant(Index n) {
  SimpleSet s(NonnegOrthant{n}, n);
  s.anchor_ = Vector::Zero(n);
  return s;
}

SimpleSet SimpleSet::singleton(Vector point) {
  const Index n = point.size();
  SimpleSet s(Singleton{point}, n);
  s.bounded_ = true;
  s.anchor_ = point;
  s.bbox_ = std::make_pair(point, point);
  return s;
}

SimpleSet SimpleSet::polyhedron(Matrix e, Vector f, bool nonneg,
                                ProjectionOptions options,
                                std::optional<Vector> feasible_point) {
  require_dim(f.size(), e.rows(), "polyhedron right-hand side");
  if (options.tol <= 0.0 || options.max_sweeps < 1) {
    throw DomainError("polyhedron: invalid projection options");
  }
  const Index n = e.cols();
  Polyhedron p{std::move(e), std::move(f), nonneg};

  Vector anchor;
  if (feasible_point) {
    require_dim(feasible_point->size(), n, "polyhedron feasible point");
    if (!polyhedron_holds(p, *feasible_point)) {
      throw DomainError("polyhedron: supplied feasible point violates the constraints");
    }
    anchor = *feasible_point;
  } else {
    try {
      anchor = dykstra(p, Vector::Zero(n), options);
    } catch (const ProjectionError&) {
      throw DomainError("polyhedron appears empty: projection of 0 did not converge");
    }
    if (!polyhedron_holds(p, anchor)) {
      throw DomainError("polyhedron appears empty: projection of 0 is infeasible");
    }
  }

  // Bounded iff the recession cone {d : E d <= 0, d >= 0} is {0}. A nonzero
  // cone misses the polar of at least half the directions, so 64 random
  // probes all projecting to 0 only happens when the cone is trivial.
  Polyhedron cone{p.e, Vector::Zero(p.e.rows()), nonneg};
  Rng rng(kRecessionSeed);
  bool bounded = true;
  for (int t = 0; t < kRecessionProbes && bounded; ++t) {
    const Vector d = rng.uniform_vector(n, -1.0, 1.0);
    const Vector pd = dykstra(cone, d, ProjectionOptions{});
    if (pd.norm() > 1e-8 * d.norm()) bounded = false;
  }

  SimpleSet s(std::move(p), n);
  s.options_ = options;
  s.anchor_ = std::move(anchor);
  s.bounded_ = bounded;
  return s;
}

std::string_view SimpleSet::kind_name() const {
  struct Visitor {
    std::string_view operator()(const WholeSpace&) const { return "whole-space"; }
    std::string_view operator()(const Box&) const { return "box"; }
    std::string_view operator()(const NonnegOrthant&) const { return "orthant"; }
    std::string_view operator()(const Polyhedron&) const { return "polyhedron"; }
    std::string_view operator()(const Singleton&) const { return "singleton"; }
  };
  return std::visit(Visitor{}, shape_);
}

Vector SimpleSet::project(const Vector& x) const {
  require_dim(x.size(), dim_, "projection argument");
  struct Visitor {
    const Vector& x;
    const ProjectionOptions& opt;
    Vector operator()(const WholeSpace&) const { return x; }
    Vector operator()(const Box& b) const {
      return x.cwiseMax(b.lo).cwiseMin(b.hi);
    }
    Vector operator()(const NonnegOrthant&) const { return x.cwiseMax(0.0); }
    Vector operator()(const Polyhedron& p) const { return dykstra(p, x, opt); }
    Vector operator()(const Singleton& s) const { return s.point; }
  };
  return std::visit(Visitor{x, options_}, shape_);
}

bool SimpleSet::contains(const Vector& x, double tol) const {
  if (x.size() != dim_) return false;
  return (project(x) - x).norm() <= tol * std::max(1.0, x.norm());
}

std::optional<std::pair<Vector, Vector>> SimpleSet::bounding_box() const {
  return bbox_;
}

Vector SimpleSet::sample(Rng& rng, double radius) const {
  if (bbox_) return rng.uniform_vector(bbox_->first, bbox_->second);
  const Vector lo = anchor_.array() - radius;
  const Vector hi = anchor_.array() + radius;
  return project(rng.uniform_vector(lo, hi));
}

Vector project(const SimpleSet& set, const Vector& x) { return set.project(x); }

}  // namespace bivi
