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

#ifndef BIVI_PROBLEMS_HPP_
#define BIVI_PROBLEMS_HPP_

#include <cstdint>

#include "bivi/problem.hpp"
#include "bivi/traffic.hpp"

namespace bivi {

/// Best Nash equilibrium of a two-player zero-sum game: F(x) = A x + b with
/// A = [[0, -0.1], [0.1, 0]], b = [1, 0], X = [11, 60] x [10, 50], H(x) = x.
/// The lower-level solution set is the segment [11, 60] x {10} and the
/// upper-level solution is x* = [11, 10]; x0 = [40, 40].
BilevelProblem make_example1();

/// Random strongly monotone instance of size m:
///   H(x) = Q x + p,  Q = (Q0 + Q0^T)/2 + m I
///   F(x) = N^T N x + q
///   X = {x >= 0 : E x <= f},  E in [-1, 1]^{10 x m},  f = m
/// with p, q, Q0, N uniform in [-2, 2] and x0 = ones. The generator is
/// Rng(seed) drawing Q0, N, p, q, E in that order, each row-major. A seed
/// whose instance has x0 infeasible is skipped for seed + 1 (noted in the
/// problem notes).
BilevelProblem make_example2(int m, std::uint64_t seed);

/// Path-based traffic equilibrium as an NCP on x = [h; u]:
///   F(x) = [C(h) - Omega^T u; Omega h - d],  X = R^{paths + pairs}_+
/// with upper-level H(x) = [grad f(h); 0] for the total cost
/// f(h) = sum_i C_i(h). The analytic gradient is checked against central
/// differences at construction.
BilevelProblem make_example3(const TrafficNetwork& network);

/// One-dimensional toy: F(x) = x, H(x) = x, X = [-1, 1].
BilevelProblem make_toy_interval();

}  // namespace bivi

#endif  // BIVI_PROBLEMS_HPP_
