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

// Cost of one solver iteration on the experiment problems.

#include <benchmark/benchmark.h>

#include "bivi/problems.hpp"
#include "bivi/solver.hpp"
#include "bivi/traffic.hpp"

namespace bivi {
namespace {

Schedule constant_schedule(const BilevelProblem& p, double lambda) {
  return Schedule(ScheduleConfig{EtaConstant{0.1}, AlphaConstant{0.5}, LambdaConstant{lambda}},
                  p.l_f(), p.l_h(), p.mu());
}

void run_steps(benchmark::State& state, const BilevelProblem& p, const Schedule& s) {
  SolverState st = initial_state(p, s);
  for (auto _ : state) benchmark::DoNotOptimize(step(st, p, s));
  state.SetItemsProcessed(state.iterations());
}

void BM_StepExample1(benchmark::State& state) {
  const BilevelProblem p = make_example1();
  run_steps(state, p, constant_schedule(p, 1.0));
}
BENCHMARK(BM_StepExample1);

// Orthant plus two simplex-type rows; the polyhedral projection dominates.
void BM_StepExample2(benchmark::State& state) {
  const BilevelProblem p = make_example2(static_cast<int>(state.range(0)), 1);
  run_steps(state, p, constant_schedule(p, 0.99 / (p.l_f() + 0.1 * p.l_h())));
}
BENCHMARK(BM_StepExample2)->Arg(20)->Arg(100);

void BM_StepExample3(benchmark::State& state) {
  const BilevelProblem p = make_example3(load_network(default_network_path()));
  run_steps(state, p, constant_schedule(p, 0.1));
}
BENCHMARK(BM_StepExample3);

// A full run with sampled invariant checks, the preset workload of the
// reproduction criterion.
void BM_RunExample1Checked(benchmark::State& state) {
  const BilevelProblem p = make_example1();
  const Schedule s = constant_schedule(p, 1.0);
  StoppingRule stop;
  stop.max_iters = 5000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(p, s, stop, RunOptions{.check = CheckLevel::kSampled}));
  }
}
BENCHMARK(BM_RunExample1Checked)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace bivi
