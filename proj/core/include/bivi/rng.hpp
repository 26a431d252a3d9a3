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

#ifndef BIVI_RNG_HPP_
#define BIVI_RNG_HPP_

#include <cstdint>
#include <random>

#include "bivi/common.hpp"

namespace bivi {

/// Seeded random source used by every generator and sampler in the toolkit.
///
/// The engine is std::mt19937_64 seeded with a single 64-bit value, whose
/// output sequence is fixed by the C++ standard. Floating values never go
/// through std::uniform_real_distribution (its algorithm is
/// implementation-defined); instead a draw is mapped explicitly:
///
///     u = (bits >> 11) * 2^-53          in [0, 1)
///     v = lo + (hi - lo) * u
///
/// so the same seed reproduces the same doubles in any language that
/// implements MT19937-64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  double unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  Vector uniform_vector(Index n, double lo, double hi) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  Vector uniform_vector(const Vector& lo, const Vector& hi) {
    Vector v(lo.size());
    for (Index i = 0; i < lo.size(); ++i) v[i] = uniform(lo[i], hi[i]);
    return v;
  }

  // Row-major fill, so the stream order matches the documented layout.
  Matrix uniform_matrix(Index rows, Index cols, double lo, double hi) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
    }
    return m;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bivi

#endif  // BIVI_RNG_HPP_
