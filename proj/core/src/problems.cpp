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

#include "bivi/problems.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "bivi/rng.hpp"

namespace bivi {
namespace {

constexpr int kExample2Rows = 10;
constexpr int kMaxReseeds = 100;
constexpr int kGradientChecks = 5;
constexpr double kGradientRelTol = 1e-6;
constexpr int kLipschitzSamples = 200;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Central-difference check of grad f at random nonnegative flows.
void check_gradient(const TrafficNetwork& net, std::uint64_t seed) {
  Rng rng(seed);
  const double scale = std::max(1.0, net.demand.maxCoeff());
  for (int t = 0; t < kGradientChecks; ++t) {
    const Vector h = rng.uniform_vector(net.num_paths(), 0.0, scale);
    const Vector g = net.total_cost_gradient(h);
    Vector fd(h.size());
    for (Index i = 0; i < h.size(); ++i) {
      const double step = 1e-4 * std::max(1.0, std::abs(h[i]));
      Vector hp = h;
      Vector hm = h;
      hp[i] += step;
      hm[i] -= step;
      fd[i] = (net.total_cost(hp) - net.total_cost(hm)) / (2.0 * step);
    }
    const double err = (fd - g).norm() / std::max(1e-12, g.norm());
    if (!(err <= kGradientRelTol)) {
      throw DomainError("traffic gradient check failed: relative error " + fmt(err));
    }
  }
}

}  // namespace

BilevelProblem make_example1() {
  Matrix a(2, 2);
  a << 0.0, -0.1, 0.1, 0.0;
  const Vector b = (Vector(2) << 1.0, 0.0).finished();
  const Vector lo = (Vector(2) << 11.0, 10.0).finished();
  const Vector hi = (Vector(2) << 60.0, 50.0).finished();
  const Vector x_star = (Vector(2) << 11.0, 10.0).finished();
  // SOL(F, X) = [11, 60] x {10}, so B_H = sup_Q |x| = |[60, 10]|.
  const Vector far_end = (Vector(2) << 60.0, 10.0).finished();

  ProblemSpec spec{
      .name = "example1",
      .f = Operator::affine(a, b),
      .h = Operator::identity(2),
      .x = SimpleSet::box(lo, hi),
      .omega = std::nullopt,
      .initial_point = (Vector(2) << 40.0, 40.0).finished(),
      .d_x = Constant::exact((hi - lo).norm()),
      .c_h = Constant::exact(hi.norm()),
      .b_h = Constant::exact(far_end.norm()),
      .known_solution = x_star,
      .sharpness = std::nullopt,
      .notes = {"Omega is the whole space (F and H are everywhere defined)"},
  };
  return BilevelProblem(std::move(spec));
}

BilevelProblem make_example2(int m, std::uint64_t seed) {
  if (m < 2) throw DomainError("example2 needs m >= 2");
  std::vector<std::string> notes;
  for (int attempt = 0; attempt < kMaxReseeds; ++attempt) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
    Rng rng(s);
    const Matrix q0 = rng.uniform_matrix(m, m, -2.0, 2.0);
    const Matrix n = rng.uniform_matrix(m, m, -2.0, 2.0);
    const Vector p = rng.uniform_vector(m, -2.0, 2.0);
    const Vector q = rng.uniform_vector(m, -2.0, 2.0);
    const Matrix e = rng.uniform_matrix(kExample2Rows, m, -1.0, 1.0);
    const Vector f = Vector::Constant(kExample2Rows, static_cast<double>(m));
    const Vector x0 = Vector::Ones(m);
    if (((e * x0 - f).array() > 0.0).any()) {
      notes.push_back("seed " + std::to_string(s) + " gave an infeasible x0; reseeded");
      continue;
    }
    const Matrix sym_q0 = 0.5 * (q0 + q0.transpose());
    const Matrix qm = sym_q0 + static_cast<double>(m) * Matrix::Identity(m, m);
    const Matrix ntn = n.transpose() * n;
    const double sym_q0_norm =
        Eigen::SelfAdjointEigenSolver<Matrix>(sym_q0, Eigen::EigenvaluesOnly)
            .eigenvalues()
            .cwiseAbs()
            .maxCoeff();
    notes.push_back("seed " + std::to_string(s));
    notes.push_back("mu floor m - |sym(Q0)| = " + fmt(m - sym_q0_norm));

    ProblemSpec spec{
        .name = "example2",
        .f = Operator::affine(ntn, q),
        .h = Operator::affine(qm, p),
        .x = SimpleSet::polyhedron(e, f, true, {}, x0),
        .omega = std::nullopt,
        .initial_point = x0,
        .d_x = Constant::unavailable(),
        .c_h = Constant::unavailable(),
        .b_h = Constant::unavailable(),
        .known_solution = std::nullopt,
        .sharpness = std::nullopt,
        .notes = notes,
    };
    if (spec.x.is_bounded()) {
      spec.notes.push_back("X is bounded but D_X, C_H are not computed");
    } else {
      spec.notes.push_back("X is unbounded: D_X and C_H unavailable");
    }
    return BilevelProblem(std::move(spec), s);
  }
  throw DomainError("example2: no feasible instance within " +
                    std::to_string(kMaxReseeds) + " seeds");
}

BilevelProblem make_example3(const TrafficNetwork& network) {
  network.validate();
  check_gradient(network, 3);
  const Index np = network.num_paths();
  const Index nod = network.num_od();
  const Index n = np + nod;
  const bool linear = network.all_linear();

  auto net = std::make_shared<const TrafficNetwork>(network);
  Operator::Map f_map = [net, np, nod](const Vector& x) {
    const Vector h = x.head(np);
    const Vector u = x.tail(nod);
    Vector out(np + nod);
    out.head(np) = net->path_costs(h) - net->od_incidence.transpose() * u;
    out.tail(nod) = net->od_incidence * h - net->demand;
    return out;
  };
  Operator::Map h_map = [net, np, nod](const Vector& x) {
    Vector out = Vector::Zero(np + nod);
    out.head(np) = net->total_cost_gradient(x.head(np));
    return out;
  };

  std::vector<std::string> notes = {
      "H = [grad f; 0] for the total path cost f (u-block zero)",
      "network parameters are a literature reconstruction; results are qualitative",
      "X is the nonnegative orthant: D_X unbounded, compactness-based bounds skipped"};

  double l_f = 0.0;
  double l_h = 0.0;
  Constant c_h = Constant::unavailable();
  if (linear) {
    // With n_a = 1 the cost block is affine: J = [[D^T W D, -O^T], [O, 0]].
    Vector w(network.num_arcs());
    for (Index a = 0; a < network.num_arcs(); ++a) {
      w[a] = 0.15 * network.arcs[a].t0 / network.arcs[a].cap;
    }
    Matrix jac = Matrix::Zero(n, n);
    jac.topLeftCorner(np, np) = network.delta.transpose() * w.asDiagonal() * network.delta;
    jac.topRightCorner(np, nod) = -network.od_incidence.transpose();
    jac.bottomLeftCorner(nod, np) = network.od_incidence;
    l_f = spectral_norm(jac);
    // H is constant, hence L_H = 0 and C_H = |H|.
    c_h = Constant::exact(h_map(Vector::Zero(n)).norm());
    notes.push_back("n_a = 1: L_F is the spectral norm of the constant Jacobian");
  } else {
    // Finite-difference secant estimates over a flow box.
    Rng rng(5);
    const double top = std::max(1.0, network.demand.maxCoeff());
    for (int t = 0; t < kLipschitzSamples; ++t) {
      const Vector a = rng.uniform_vector(n, 0.0, top);
      const Vector b = rng.uniform_vector(n, 0.0, top);
      const double d = (a - b).norm();
      l_f = std::max(l_f, (f_map(a) - f_map(b)).norm() / d);
      l_h = std::max(l_h, (h_map(a) - h_map(b)).norm() / d);
    }
    notes.push_back("n_a > 1: L_F and L_H are sampled estimates over [0, max demand]");
  }

  // Non-integer exponents are undefined for negative flows; keep the
  // extrapolated point in the domain then.
  bool integer_powers = true;
  for (const Arc& a : network.arcs) integer_powers &= std::floor(a.n) == a.n;

  ProblemSpec spec{
      .name = "example3",
      .f = Operator::callable(n, f_map, l_f, 0.0, OperatorKind::kNcpTraffic),
      .h = Operator::callable(n, h_map, l_h, 0.0, OperatorKind::kCallable),
      .x = SimpleSet::orthant(n),
      .omega = integer_powers ? std::nullopt : std::optional<SimpleSet>(SimpleSet::orthant(n)),
      .initial_point = Vector::Ones(n),
      .d_x = Constant::unavailable(),
      .c_h = c_h,
      .b_h = c_h,
      .known_solution = std::nullopt,
      .sharpness = std::nullopt,
      .notes = notes,
  };
  return BilevelProblem(std::move(spec));
}

BilevelProblem make_toy_interval() {
  const Vector lo = Vector::Constant(1, -1.0);
  const Vector hi = Vector::Constant(1, 1.0);
  ProblemSpec spec{
      .name = "toy-interval",
      .f = Operator::identity(1),
      .h = Operator::identity(1),
      .x = SimpleSet::box(lo, hi),
      .omega = std::nullopt,
      .initial_point = Vector::Constant(1, 1.0),
      .d_x = Constant::exact(2.0),
      .c_h = Constant::exact(1.0),
      .b_h = Constant::exact(0.0),
      .known_solution = Vector::Constant(1, 0.0),
      .sharpness = std::nullopt,
      .notes = {},
  };
  return BilevelProblem(std::move(spec));
}

}  // namespace bivi
