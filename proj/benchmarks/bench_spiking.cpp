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

#include "eqprop/spiking.hpp"

namespace {

using namespace eqprop;

NeuronConstants fig5_constants() {
  NeuronConstants k;
  k.tau_s = 15.0;
  k.tau_r = 100.0;
  return k;
}

void BM_SpikingStep(benchmark::State& state) {
  const int per_dim = static_cast<int>(state.range(0));
  const int hidden = static_cast<int>(state.range(1));
  const NeuronConstants k = fig5_constants();
  PopulationCode code;
  code.neurons_per_dim = per_dim;
  auto topo = build_topology({2 * per_dim, hidden, 2 * per_dim}, true);
  Rng rng(RngSpec{1, 0});
  const NetworkParams params = init_weights(topo, rng, 0.1);

  SpikingState st = make_spiking_state(*topo, k);
  Eigen::VectorXd currents = Eigen::VectorXd::Zero(topo->size());
  currents.head(2 * per_dim) = encode_input({0.7, 0.3}, code);
  currents(topo->bias_index()) = 1.0;

  for (auto _ : state) {
    step_spiking(st, params, k, currents, 1.0);
    benchmark::DoNotOptimize(st.u.data());
  }
  state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK(BM_SpikingStep)->Args({10, 100})->Args({20, 300});
