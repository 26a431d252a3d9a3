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

#include "bivi/operator.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace bivi {
namespace {

constexpr double kPsdFloor = -1e-10;
constexpr double kMuSlack = 1e-8;

}  // namespace

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::kAffine:
      return "affine";
    case OperatorKind::kCallable:
      return "callable";
    case OperatorKind::kNcpTraffic:
      return "ncp-traffic";
  }
  return "unknown";
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

Operator Operator::affine(Matrix a, Vector b) {
  if (a.rows() != a.cols()) {
    throw DimensionError("affine operator: matrix must be square");
  }
  require_dim(b.size(), a.rows(), "affine operator offset");

  auto data = std::make_shared<Affine>();
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  data->sym_min_eig = ev.size() ? ev.minCoeff() : 0.0;
  data->sym_norm = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
  if (data->sym_min_eig < kPsdFloor) {
    throw DomainError("affine operator is not monotone: symmetric part has "
                      "eigenvalue " + std::to_string(data->sym_min_eig));
  }

  Operator op;
  op.kind_ = OperatorKind::kAffine;
  op.dim_ = a.rows();
  op.lipschitz_ = spectral_norm(a);
  op.mu_ = std::max(0.0, data->sym_min_eig);
  data->a = std::move(a);
  data->b = std::move(b);
  op.affine_ = std::move(data);
  return op;
}

Operator Operator::affine(Matrix a, Vector b, double mu) {
  Operator op = affine(std::move(a), std::move(b));
  if (mu < 0.0) throw DomainError("strong monotonicity modulus must be >= 0");
  if (mu > op.affine_->sym_min_eig + kMuSlack) {
    throw DomainError("strong monotonicity modulus " + std::to_string(mu) +
                      " exceeds the smallest eigenvalue of sym(A) " +
                      std::to_string(op.affine_->sym_min_eig));
  }
  op.mu_ = mu;
  return op;
}

Operator Operator::callable(Index dim, Map map, double lipschitz, double mu,
                            OperatorKind kind) {
  if (!map) throw DomainError("callable operator needs a map");
  if (lipschitz < 0.0 || mu < 0.0) {
    throw DomainError("operator constants must be nonnegative");
  }
  if (kind == OperatorKind::kAffine) {
    throw DomainError("use Operator::affine for affine maps");
  }
  Operator op;
  op.kind_ = kind;
  op.dim_ = dim;
  op.lipschitz_ = lipschitz;
  op.mu_ = mu;
  op.map_ = std::move(map);
  return op;
}

Operator Operator::zero(Index dim) {
  return affine(Matrix::Zero(dim, dim), Vector::Zero(dim));
}

Operator Operator::identity(Index dim) {
  return affine(Matrix::Identity(dim, dim), Vector::Zero(dim));
}

Vector Operator::operator()(const Vector& x) const {
  require_dim(x.size(), dim_, "operator argument");
  if (affine_) {
    Vector out = affine_->b;
    out.noalias() += affine_->a * x;
    return out;
  }
  Vector out = map_(x);
  require_dim(out.size(), dim_, "operator value");
  return out;
}

const Matrix& Operator::matrix() const {
  if (!affine_) throw DomainError("operator is not affine");
  return affine_->a;
}

const Vector& Operator::offset() const {
  if (!affine_) throw DomainError("operator is not affine");
  return affine_->b;
}

double Operator::sym_min_eigenvalue() const {
  if (!affine_) throw DomainError("operator is not affine");
  return affine_->sym_min_eig;
}

double Operator::sym_norm() const {
  if (!affine_) throw DomainError("operator is not affine");
  return affine_->sym_norm;
}

Vector eval_operator(const Operator& op, const Vector& x) { return op(x); }

}  // namespace bivi
