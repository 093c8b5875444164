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

#include <doctest.h>

#include <cmath>

#include "eqprop/activation.hpp"
#include "eqprop/spiking.hpp"

using namespace eqprop;

TEST_CASE("relu and its derivative") {
  CHECK(relu(-3.0) == 0.0);
  CHECK(relu(2.5) == 2.5);
  CHECK(relu(0.0) == 0.0);
  CHECK(relu_prime(2.0) == 1.0);
  CHECK(relu_prime(-1.0) == 0.0);
  CHECK(relu_prime(0.0) == 0.0);
}

TEST_CASE("liffi branch structure and the v=40 value") {
  const NeuronConstants k;  // tau=15, u_r=0, theta=20, delta=5
  CHECK(liffi(10.0, k) == 0.0);
  CHECK(liffi(20.0, k) == 0.0);  // at threshold, not strictly above

  const double f40 = liffi(40.0, k);
  // 1 / (15 ln 2 + 5)
  CHECK(f40 == doctest::Approx(1.0 / (15.0 * std::log(2.0) + 5.0)).epsilon(1e-15));
  CHECK(f40 == doctest::Approx(0.0649).epsilon(2e-3));
}

TEST_CASE("liffi is strictly increasing above threshold") {
  const NeuronConstants k;
  double prev = 0.0;
  for (double v = 20.5; v < 200.0; v += 0.5) {
    const double f = liffi(v, k);
    CHECK(f > prev);
    prev = f;
  }
}

TEST_CASE("liffi saturates at 1/delta") {
  const NeuronConstants k;
  const double limit = 1.0 / k.delta;
  CHECK(std::abs(liffi(1e9, k) - limit) / limit < 1e-3);
}

TEST_CASE("surrogate derivative is the v>0 step") {
  CHECK(liffi_surrogate_prime(5.0) == 1.0);
  CHECK(liffi_surrogate_prime(-1.0) == 0.0);
  CHECK(liffi_surrogate_prime(0.0) == 0.0);
}

TEST_CASE("activation parsing round-trips") {
  CHECK(parse_activation_kind("relu") == ActivationKind::kRelu);
  CHECK(parse_activation_kind("liffi") == ActivationKind::kLiffi);
  CHECK_THROWS(parse_activation_kind("tanh"));
  CHECK(parse_derivative_mode("exact") == DerivativeMode::kExact);
  CHECK(parse_derivative_mode("surrogate") == DerivativeMode::kSurrogate);
  CHECK_THROWS(parse_derivative_mode("soft"));
}

TEST_CASE("liffi rate activation treats the state as a current in [0,1]") {
  const NeuronConstants k;
  const Activation act(ActivationKind::kLiffi, DerivativeMode::kExact, k);
  CHECK(act.rho(0.0) == 0.0);   // u_rest == theta: zero rate at zero state
  CHECK(act.rho(-5.0) == 0.0);
  CHECK(act.rho(0.5) == liffi(40.0, k));  // u_0 + R * 0.5
  CHECK(act.rho(1.0) == liffi(60.0, k));

  // Central-difference slope against the closed-form derivative
  // d/ds f(u_0 + R s) = R f^2 tau (1/(v-theta) - 1/(v-u_r)).
  const double v = 40.0;
  const double f = liffi(v, k);
  const double analytic = k.resistance * f * f * k.tau *
                          (1.0 / (v - k.theta) - 1.0 / (v - k.u_reset));
  CHECK(act.rho_prime(0.5) == doctest::Approx(analytic).epsilon(1e-6));

  const Activation sur(ActivationKind::kLiffi, DerivativeMode::kSurrogate, k);
  CHECK(sur.rho_prime(0.5) == 1.0);
  CHECK(sur.rho_prime(0.0) == 0.0);
}

TEST_CASE("neuron constants are validated") {
  NeuronConstants k;
  k.tau = -1.0;
  CHECK_THROWS_AS(k.validate(), std::invalid_argument);
  k = NeuronConstants{};
  k.theta = k.u_reset;
  CHECK_THROWS_AS(k.validate(), std::invalid_argument);
  k = NeuronConstants{};
  CHECK_NOTHROW(k.validate());
}

TEST_CASE("fine-step single-neuron simulation reproduces liffi within 1%") {
  const NeuronConstants k;
  for (double v : {25.0, 30.0, 40.0, 60.0}) {
    const double analytic = liffi(v, k);
    const double simulated = lif_rate_empirical(v, k, 0.01, 100000.0);
    CHECK(std::abs(simulated - analytic) / analytic < 0.01);
  }
}
