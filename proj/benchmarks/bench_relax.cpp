// Copyright 2026 The Eqprop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "eqprop/rate_training.hpp"

namespace {

using namespace eqprop;

void BM_RelaxStep(benchmark::State& state) {
  const int hidden = static_cast<int>(state.range(0));
  auto topo = build_topology({2, hidden, 2}, true);
  Rng rng(RngSpec{1, 0});
  const NetworkParams params = init_weights(topo, rng, 0.5);
  const Activation act(ActivationKind::kRelu, DerivativeMode::kSurrogate, {});

  RateState st;
  st.s = Eigen::VectorXd::Constant(topo->size(), 0.1);
  st.s_hat = Eigen::VectorXd::Zero(topo->size());
  st.s(0) = 0.4;
  st.s(1) = 0.8;

  RelaxOptions ro;
  ro.dt = 1.0;
  ro.duration = 1.0;  // one Euler step per iteration
  for (auto _ : state) {
    relax(st, params, act, ro);
    benchmark::DoNotOptimize(st.s.data());
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_ForwardPhase(benchmark::State& state) {
  const int hidden = static_cast<int>(state.range(0));
  auto topo = build_topology({2, hidden, 2}, true);
  Rng rng(RngSpec{1, 0});
  const NetworkParams params = init_weights(topo, rng, 0.5);
  const Activation act(ActivationKind::kRelu, DerivativeMode::kSurrogate, {});
  const PhaseSchedule sched{600.0, 600.0, 1.0, 1.0};

  for (auto _ : state) {
    const PhaseResult fwd =
        forward_phase(params, Eigen::Vector2d{0.4, 0.8}, sched, act);
    benchmark::DoNotOptimize(fwd.state.s.data());
  }
  state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK(BM_RelaxStep)->Arg(100)->Arg(400);
BENCHMARK(BM_ForwardPhase)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
