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

#ifndef BIVI_OPERATOR_HPP_
#define BIVI_OPERATOR_HPP_

#include <functional>
#include <memory>
#include <optional>
#include <string_view>

#include "bivi/common.hpp"

namespace bivi {

enum class OperatorKind { kAffine, kCallable, kNcpTraffic };

std::string_view to_string(OperatorKind kind);

/// A single-valued monotone map R^n -> R^n with its Lipschitz and
/// strong-monotonicity metadata.
///
/// Affine operators x -> A x + b are validated at construction: the
/// symmetric part of A must be positive semidefinite (eigenvalue floor
/// -1e-10), the Lipschitz constant is the spectral norm of A, and the
/// strong-monotonicity modulus may not exceed the smallest eigenvalue of the
/// symmetric part. Callable operators carry user-supplied constants that are
/// not certified.
///
/// Instances are immutable; copies share the evaluation state and are safe
/// to use from several threads.
class Operator {
 public:
  using Map = std::function<Vector(const Vector&)>;

  /// Affine map with mu = max(0, smallest eigenvalue of sym(A)).
  static Operator affine(Matrix a, Vector b);
  /// Affine map with an explicit modulus, validated against sym(A).
  static Operator affine(Matrix a, Vector b, double mu);

  static Operator callable(Index dim, Map map, double lipschitz,
                           double mu = 0.0,
                           OperatorKind kind = OperatorKind::kCallable);

  static Operator zero(Index dim);
  static Operator identity(Index dim);

  Vector operator()(const Vector& x) const;

  Index dim() const { return dim_; }
  OperatorKind kind() const { return kind_; }
  bool is_affine() const { return kind_ == OperatorKind::kAffine; }
  double lipschitz() const { return lipschitz_; }
  double mu() const { return mu_; }

  // Affine accessors; throw DomainError for other kinds.
  const Matrix& matrix() const;
  const Vector& offset() const;
  double sym_min_eigenvalue() const;
  double sym_norm() const;

 private:
  struct Affine {
    Matrix a;
    Vector b;
    double sym_min_eig = 0.0;
    double sym_norm = 0.0;
  };

  Operator() = default;

  OperatorKind kind_ = OperatorKind::kCallable;
  Index dim_ = 0;
  double lipschitz_ = 0.0;
  double mu_ = 0.0;
  std::shared_ptr<const Affine> affine_;
  Map map_;
};

/// Evaluates op at x. Throws DimensionError on a size mismatch.
Vector eval_operator(const Operator& op, const Vector& x);

double spectral_norm(const Matrix& a);

}  // namespace bivi

#endif  // BIVI_OPERATOR_HPP_
