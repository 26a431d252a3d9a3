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

// Diagnostics that run once per recorded row: gap oracles and the closed
// forms behind the bound columns.

#include <benchmark/benchmark.h>

#include "bivi/diagnostics.hpp"
#include "bivi/problems.hpp"
#include "bivi/rng.hpp"

namespace bivi {
namespace {

void BM_GapExactAffine(benchmark::State& state) {
  const BilevelProblem p = make_example1();
  const Vector z = Vector::Constant(2, 20.0);
  for (auto _ : state) benchmark::DoNotOptimize(gap_fx(z, p, GapMethod::kExactAffine));
}
BENCHMARK(BM_GapExactAffine);

void BM_GapSampled(benchmark::State& state) {
  const BilevelProblem p = make_example1();
  const Vector z = Vector::Constant(2, 20.0);
  for (auto _ : state) benchmark::DoNotOptimize(gap_fx(z, p, GapMethod::kSampled));
}
BENCHMARK(BM_GapSampled);

void BM_InfeasibilityPhi(benchmark::State& state) {
  const BilevelProblem p = make_example2(100, 1);
  const Vector y = Vector::Ones(100);
  for (auto _ : state) benchmark::DoNotOptimize(infeasibility_phi(y, p.f()));
}
BENCHMARK(BM_InfeasibilityPhi);

void BM_LemmaMin(benchmark::State& state) {
  Rng rng(4);
  const double a = rng.uniform(0, 3), b = rng.uniform(0, 3), c = rng.uniform(0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(lemma_min(a, b, c));
}
BENCHMARK(BM_LemmaMin);

}  // namespace
}  // namespace bivi
