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

#include <limits>

#include "bivi/sets.hpp"
#include "support.hpp"

namespace bivi {
namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

SimpleSet game_box() { return SimpleSet::box(v2(11, 10), v2(60, 50)); }

TEST(Project, BoxClampsComponentwise) {
  EXPECT_EQ(game_box().project(v2(-5, 100)), v2(11, 50));
  EXPECT_EQ(project(game_box(), v2(30, 20)), v2(30, 20));
}

TEST(Project, OrthantClampsAtZero) {
  EXPECT_EQ(SimpleSet::orthant(2).project(v2(-1, 2)), v2(0, 2));
}

TEST(Project, WholeSpaceIsIdentity) {
  const Vector x = v2(-3.5, 1e6);
  EXPECT_EQ(SimpleSet::whole_space(2).project(x), x);
}

TEST(Project, SymmetricPolyhedron) {
  Matrix e(1, 2);
  e << 1, 1;
  const SimpleSet p = SimpleSet::polyhedron(e, Vector::Ones(1), true);
  const Vector z = p.project(v2(1, 1));
  EXPECT_NEAR(z[0], 0.5, 1e-9);
  EXPECT_NEAR(z[1], 0.5, 1e-9);
}

TEST(Project, DegenerateBoxAndSingleton) {
  const SimpleSet b = SimpleSet::box(v2(1, 2), v2(1, 2));
  EXPECT_EQ(b.project(v2(-7, 9)), v2(1, 2));
  const SimpleSet s = SimpleSet::singleton(v2(3, 4));
  EXPECT_EQ(s.project(v2(0, 0)), v2(3, 4));
  EXPECT_TRUE(s.is_bounded());
}

TEST(Project, DimensionMismatch) {
  EXPECT_THROW(game_box().project(Vector::Zero(3)), DimensionError);
}

TEST(HalfspaceProject, Examples) {
  EXPECT_EQ(halfspace_project(v2(1, 0), 0.0, v2(2, 3)), v2(0, 3));
  EXPECT_EQ(halfspace_project(v2(1, 1), 2.0, v2(1, 1)), v2(1, 1));
  const Vector z = halfspace_project(v2(1, 1), 0.0, v2(1, 1));
  EXPECT_NEAR(z[0], 0.0, 1e-15);
  EXPECT_NEAR(z[1], 0.0, 1e-15);
  EXPECT_THROW(halfspace_project(v2(0, 0), 1.0, v2(1, 1)), DomainError);
}

TEST(SetConstruction, Validation) {
  EXPECT_THROW(SimpleSet::box(v2(1, 0), v2(0, 1)), DomainError);
  EXPECT_THROW(SimpleSet::box(v2(0, 0), v2(std::numeric_limits<double>::infinity(), 1)),
               DomainError);
  Matrix e(2, 1);
  e << 1, -1;
  // x <= -1 and x >= 1: empty.
  EXPECT_THROW(SimpleSet::polyhedron(e, (Vector(2) << -1, -1).finished(), false), Error);
  Matrix e2(1, 2);
  e2 << 1, 1;
  EXPECT_THROW(SimpleSet::polyhedron(e2, Vector::Ones(1), true, {}, v2(2, 2)), DomainError);
  EXPECT_NO_THROW(SimpleSet::polyhedron(e2, Vector::Ones(1), true, {}, v2(0.25, 0.25)));
}

TEST(SetConstruction, Boundedness) {
  EXPECT_TRUE(game_box().is_bounded());
  EXPECT_FALSE(SimpleSet::orthant(3).is_bounded());
  EXPECT_FALSE(SimpleSet::whole_space(3).is_bounded());
  Matrix e(1, 2);
  e << 1, 1;
  EXPECT_TRUE(SimpleSet::polyhedron(e, Vector::Ones(1), true).is_bounded());
  EXPECT_FALSE(SimpleSet::polyhedron(e, Vector::Ones(1), false).is_bounded());
}

TEST(Project, IterationCapReportsResidual) {
  // One sweep cannot settle two nearly parallel halfspaces.
  Matrix e(2, 2);
  e << 1, 1e-4, 1, -1e-4;
  ProjectionOptions opts;
  opts.max_sweeps = 1;
  const SimpleSet p = SimpleSet::polyhedron(e, Vector::Zero(2), false, opts, v2(-1, 0));
  try {
    p.project(v2(5, 3));
    FAIL() << "expected a projection error";
  } catch (const ProjectionError& err) {
    EXPECT_GT(err.residual(), 0.0);
    EXPECT_EQ(err.sweeps(), 1);
  }
}

TEST(Project, PolyhedronMatchesGridOracle) {
  Rng rng(2024);
  for (int t = 0; t < 20; ++t) {
    const Matrix e = rng.uniform_matrix(2, 3, -1.0, 1.0);
    const Vector f = rng.uniform_vector(2, 0.2, 1.5);
    const bool nonneg = t % 2 == 0;
    const Vector x = rng.uniform_vector(3, -2.0, 2.0);
    const SimpleSet p = SimpleSet::polyhedron(e, f, nonneg);
    const Vector z = p.project(x);
    const testing::GridProjection g = testing::grid_projection(e, f, nonneg, x, z);
    EXPECT_LE(std::abs((x - z).norm() - g.dist), 2e-3) << "instance " << t;
    // The iterative answer is never farther than any feasible grid point.
    EXPECT_LE((x - z).norm(), g.dist + 1e-9);
    EXPECT_LE(g.obtuse, 1e-10) << "instance " << t;
  }
}

std::vector<SimpleSet> property_sets() {
  Rng rng(5);
  std::vector<SimpleSet> sets;
  sets.push_back(game_box());
  sets.push_back(SimpleSet::orthant(2));
  sets.push_back(SimpleSet::whole_space(2));
  for (int t = 0; t < 3; ++t) {
    sets.push_back(SimpleSet::polyhedron(rng.uniform_matrix(3, 2, -1, 1),
                                         rng.uniform_vector(3, 0.5, 2.0), t != 1));
  }
  return sets;
}

TEST(ProjectProperty, Idempotent) {
  Rng rng(11);
  for (const auto& s : property_sets()) {
    for (int i = 0; i < 100; ++i) {
      const Vector p = s.project(rng.uniform_vector(2, -80, 80));
      EXPECT_LE((s.project(p) - p).norm(), 1e-10) << s.kind_name();
    }
  }
}

TEST(ProjectProperty, Nonexpansive) {
  Rng rng(12);
  for (const auto& s : property_sets()) {
    for (int i = 0; i < 200; ++i) {
      const Vector x = rng.uniform_vector(2, -80, 80);
      const Vector y = rng.uniform_vector(2, -80, 80);
      EXPECT_LE((s.project(x) - s.project(y)).norm(), (x - y).norm() + 1e-10) << s.kind_name();
    }
  }
}

TEST(ProjectProperty, VariationalCharacterization) {
  Rng rng(13);
  for (const auto& s : property_sets()) {
    const Vector x = rng.uniform_vector(2, -30, 30);
    const Vector p = s.project(x);
    EXPECT_TRUE(s.contains(p, 1e-9));
    for (int i = 0; i < 200; ++i) {
      const Vector xp = s.sample(rng, 40.0);
      EXPECT_LE((x - p).dot(xp - p), 1e-8) << s.kind_name();
    }
  }
}

TEST(SetSampling, SamplesLieInSet) {
  Rng rng(3);
  for (const auto& s : property_sets()) {
    for (int i = 0; i < 50; ++i) EXPECT_TRUE(s.contains(s.sample(rng), 1e-9)) << s.kind_name();
  }
}

}  // namespace
}  // namespace bivi
