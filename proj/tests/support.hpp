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

// Shared helpers for the test suites: random instances and an independent
// reference implementation of the non-inertial iteration.

#ifndef BIVI_TESTS_SUPPORT_HPP_
#define BIVI_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "bivi/common.hpp"
#include "bivi/problem.hpp"
#include "bivi/operator.hpp"
#include "bivi/rng.hpp"

namespace bivi::testing {

// A (not necessarily symmetric) matrix whose symmetric part is PSD: B^T B
// plus a skew-symmetric part.
inline Matrix random_monotone_matrix(Rng& rng, Index n, double skew = 1.0) {
  const Matrix b = rng.uniform_matrix(n, n, -1.0, 1.0);
  const Matrix s = rng.uniform_matrix(n, n, -skew, skew);
  return b.transpose() * b + (s - s.transpose());
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  const std::filesystem::path p = std::filesystem::path(BIVI_TEST_TMP_DIR) / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

// Non-inertial regularized extragradient, written out directly from
//   y_k     = P_X(x_k - lambda_k (F(x_k) + eta_k H(x_k)))
//   x_{k+1} = P_X(x_k - lambda_k (F(y_k) + eta_k H(y_k)))
// with the eta and lambda sequences passed in as plain functions. Uses only
// the set projection and operator evaluation of the library.
template <class EtaFn, class LambdaFn>
std::vector<Vector> reference_ireg(const BilevelProblem& p, long iters, EtaFn eta,
                                   LambdaFn lambda) {
  std::vector<Vector> xs{p.initial_point()};
  Vector x = p.initial_point();
  for (long k = 0; k < iters; ++k) {
    const double e = eta(k);
    const double l = lambda(k);
    const Vector y = p.x_set().project(x - l * (p.f()(x) + e * p.h()(x)));
    x = p.x_set().project(x - l * (p.f()(y) + e * p.h()(y)));
    xs.push_back(x);
  }
  return xs;
}

// Grid oracles, independent of the closed forms they check.

// Exact projection onto {E z <= f, z >= 0 if nonneg} by enumerating faces:
// for every subset of constraints taken as equalities, project onto that
// affine set and keep the closest feasible result. Exponential in the
// number of constraints, so only for tiny instances.
inline Vector enumerate_projection(const Matrix& e, const Vector& f, bool nonneg,
                                   const Vector& x) {
  const Index n = x.size();
  Matrix a(e.rows() + (nonneg ? n : 0), n);
  Vector c(a.rows());
  a.topRows(e.rows()) = e;
  c.head(e.rows()) = f;
  if (nonneg) {
    a.bottomRows(n) = -Matrix::Identity(n, n);
    c.tail(n).setZero();
  }
  const Index m = a.rows();
  Vector best;
  double best_d = 1e300;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<Index> rows;
    for (Index i = 0; i < m; ++i) {
      if (mask & (1u << i)) rows.push_back(i);
    }
    Vector z = x;
    if (!rows.empty()) {
      Matrix as(static_cast<Index>(rows.size()), n);
      Vector cs(as.rows());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        as.row(static_cast<Index>(r)) = a.row(rows[r]);
        cs[static_cast<Index>(r)] = c[rows[r]];
      }
      const Vector mu =
          Eigen::CompleteOrthogonalDecomposition<Matrix>(as * as.transpose()).solve(as * x - cs);
      z = x - as.transpose() * mu;
      if ((as * z - cs).cwiseAbs().maxCoeff() > 1e-9) continue;
    }
    if (((a * z - c).array() > 1e-9).any()) continue;
    const double d = (z - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = z;
    }
  }
  return best;
}

// Feasible points of a 1e-3 grid spanning +-0.03 around `centre` in each
// coordinate of R^3, passed to `visit`.
template <typename Visit>
void for_each_feasible_grid_point(const Matrix& e, const Vector& f, bool nonneg,
                                  const Vector& centre, Visit visit) {
  constexpr int kHalf = 30;
  constexpr double kStep = 1e-3;
  Vector z(3);
  for (int i = -kHalf; i <= kHalf; ++i) {
    z[0] = centre[0] + i * kStep;
    for (int j = -kHalf; j <= kHalf; ++j) {
      z[1] = centre[1] + j * kStep;
      for (int l = -kHalf; l <= kHalf; ++l) {
        z[2] = centre[2] + l * kStep;
        if (((e * z - f).array() > 0.0).any()) continue;
        if (nonneg && (z.array() < 0.0).any()) continue;
        visit(z);
      }
    }
  }
}

// Grid oracle for a polyhedral projection in 3-D. The window is placed by
// face enumeration. `dist` is the smallest |x - g| over feasible grid points
// g; `obtuse` is the largest <x - z, g - z> over the same points, which is
// <= 0 exactly when z is the projection (up to the window). The grid argmin
// itself is not reported: on a face nearly orthogonal to x - z the distance
// is flat, and a point off by s along the face costs only s^2 / (2 |x - z|).
struct GridProjection {
  double dist = 0.0;
  double obtuse = 0.0;
};

inline GridProjection grid_projection(const Matrix& e, const Vector& f, bool nonneg,
                                      const Vector& x, const Vector& z) {
  GridProjection out{.dist = 1e300, .obtuse = -1e300};
  const Vector centre = enumerate_projection(e, f, nonneg, x);
  for_each_feasible_grid_point(e, f, nonneg, centre, [&](const Vector& g) {
    out.dist = std::min(out.dist, (g - x).norm());
    out.obtuse = std::max(out.obtuse, (x - z).dot(g - z));
  });
  return out;
}

// Grid maximiser of <F(x), z - x> over a 2-D box, endpoints included.
inline double grid_gap(const BilevelProblem& p, const Vector& z, const Vector& lo, const Vector& hi,
                int cells) {
  double best = -1e300;
  Vector x(2);
  for (int i = 0; i <= cells; ++i) {
    x[0] = lo[0] + (hi[0] - lo[0]) * i / cells;
    for (int j = 0; j <= cells; ++j) {
      x[1] = lo[1] + (hi[1] - lo[1]) * j / cells;
      best = std::max(best, p.f()(x).dot(z - x));
    }
  }
  return best;
}

// min{a s^2 + b t^2 : s, t >= 0, s + t >= c} over a 1e-3 grid of [0, c]^2.
inline double lemma_grid(double a, double b, double c) {
  const int n = static_cast<int>(std::ceil(c / 1e-3));
  double best = 1e300;
  for (int i = 0; i <= n; ++i) {
    const double s = c * i / n;
    for (int j = 0; j <= n; ++j) {
      const double t = c * j / n;
      if (s + t >= c - 1e-12) best = std::min(best, a * s * s + b * t * t);
    }
  }
  return best;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::FILE* f = std::fopen(p.string().c_str(), "rb");
  if (!f) return {};
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
  std::fclose(f);
  return out;
}

}  // namespace bivi::testing

#endif  // BIVI_TESTS_SUPPORT_HPP_
