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

#ifndef BIVI_SETS_HPP_
#define BIVI_SETS_HPP_

#include <optional>
#include <string_view>
#include <utility>
#include <variant>

#include "bivi/common.hpp"
#include "bivi/rng.hpp"

namespace bivi {

struct WholeSpace {
  Index n = 0;
};

struct Box {
  Vector lo;
  Vector hi;
};

struct NonnegOrthant {
  Index n = 0;
};

// {x : E x <= f} intersected with the nonnegative orthant when `nonneg`.
struct Polyhedron {
  Matrix e;
  Vector f;
  bool nonneg = false;
};

struct Singleton {
  Vector point;
};

struct ProjectionOptions {
  // Dykstra stops once the squared change of all correction terms over a
  // sweep drops below tol^2 * max(1, |x|^2).
  double tol = 1e-10;
  int max_sweeps = 10000;
};

class ProjectionError : public Error {
 public:
  ProjectionError(const std::string& what, double residual, int sweeps)
      : Error(what), residual_(residual), sweeps_(sweeps) {}
  double residual() const { return residual_; }
  int sweeps() const { return sweeps_; }

 private:
  double residual_;
  int sweeps_;
};

/// A closed convex set with a projection oracle.
///
/// Boxes, orthants, singletons and the whole space project exactly by
/// clamping. Polyhedra use Dykstra's alternating projections over the rows
/// of E and the orthant; once the active constraints settle, the projection
/// onto that face is solved directly and kept if it passes the KKT check.
/// A polyhedron is checked for nonemptiness when built: the projection of 0
/// (or the supplied feasible point) must satisfy E x <= f + 1e-8 and
/// x >= -1e-8.
class SimpleSet {
 public:
  using Shape = std::variant<WholeSpace, Box, NonnegOrthant, Polyhedron,
                             Singleton>;

  static SimpleSet whole_space(Index n);
  static SimpleSet box(Vector lo, Vector hi);
  static SimpleSet orthant(Index n);
  static SimpleSet polyhedron(Matrix e, Vector f, bool nonneg,
                              ProjectionOptions options = {},
                              std::optional<Vector> feasible_point = {});
  static SimpleSet singleton(Vector point);

  Index dim() const { return dim_; }
  const Shape& shape() const { return shape_; }
  std::string_view kind_name() const;
  const ProjectionOptions& options() const { return options_; }

  bool is_whole_space() const {
    return std::holds_alternative<WholeSpace>(shape_);
  }
  bool is_bounded() const { return bounded_; }

  Vector project(const Vector& x) const;

  // Distance-to-projection test.
  bool contains(const Vector& x, double tol = 1e-10) const;

  // A point known to lie in the set.
  const Vector& anchor() const { return anchor_; }

  // Finite bounding box for bounded sets.
  std::optional<std::pair<Vector, Vector>> bounding_box() const;

  // A random point of the set: uniform in the bounding box (or in the cube
  // anchor +- radius when unbounded), then projected.
  Vector sample(Rng& rng, double radius = 10.0) const;

 private:
  SimpleSet(Shape shape, Index dim) : shape_(std::move(shape)), dim_(dim) {}

  Shape shape_;
  Index dim_ = 0;
  ProjectionOptions options_;
  bool bounded_ = false;
  Vector anchor_;
  std::optional<std::pair<Vector, Vector>> bbox_;
};

Vector project(const SimpleSet& set, const Vector& x);

/// Projection onto {z : <a, z> <= c}. Throws DomainError if a = 0.
Vector halfspace_project(const Vector& a, double c, const Vector& x);

}  // namespace bivi

#endif  // BIVI_SETS_HPP_
