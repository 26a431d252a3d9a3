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

// Projection throughput: closed-form sets against the Dykstra-based
// polyhedron.

#include <benchmark/benchmark.h>

#include "bivi/rng.hpp"
#include "bivi/sets.hpp"

namespace bivi {
namespace {

void BM_ProjectBox(benchmark::State& state) {
  const Index n = state.range(0);
  const SimpleSet box = SimpleSet::box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0));
  Rng rng(1);
  const Vector x = rng.uniform_vector(n, -3.0, 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(box.project(x));
}
BENCHMARK(BM_ProjectBox)->Arg(2)->Arg(100)->Arg(1000);

void BM_ProjectOrthant(benchmark::State& state) {
  const Index n = state.range(0);
  const SimpleSet orthant = SimpleSet::orthant(n);
  Rng rng(2);
  const Vector x = rng.uniform_vector(n, -3.0, 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(orthant.project(x));
}
BENCHMARK(BM_ProjectOrthant)->Arg(29)->Arg(1000);

// Random polyhedron {E z <= f, z >= 0} with m rows in R^n; the point is far
// outside so several constraints end up active.
void BM_ProjectPolyhedron(benchmark::State& state) {
  const Index n = state.range(0);
  const Index m = state.range(1);
  Rng rng(3);
  const SimpleSet p = SimpleSet::polyhedron(rng.uniform_matrix(m, n, -1.0, 1.0),
                                            rng.uniform_vector(m, 0.2, 1.5), true);
  const Vector x = rng.uniform_vector(n, -2.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(p.project(x));
}
BENCHMARK(BM_ProjectPolyhedron)->Args({3, 2})->Args({10, 5})->Args({30, 20});

}  // namespace
}  // namespace bivi
