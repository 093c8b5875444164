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

#include "eqprop/activation.hpp"

#include <cmath>
#include <stdexcept>

namespace eqprop {

void NeuronConstants::validate() const {
  if (tau <= 0.0) throw std::invalid_argument("neuron constants: tau must be > 0");
  if (tau_s <= 0.0) throw std::invalid_argument("neuron constants: tau_s must be > 0");
  if (tau_r <= 0.0) throw std::invalid_argument("neuron constants: tau_r must be > 0");
  if (delta < 0.0) throw std::invalid_argument("neuron constants: delta must be >= 0");
  if (theta <= u_reset) {
    throw std::invalid_argument("neuron constants: theta must exceed u_reset");
  }
}

double liffi(double v, const NeuronConstants& k) {
  if (v <= k.theta) return 0.0;
  return 1.0 / (k.tau * std::log((v - k.u_reset) / (v - k.theta)) + k.delta);
}

ActivationKind parse_activation_kind(const std::string& name) {
  if (name == "relu") return ActivationKind::kRelu;
  if (name == "liffi") return ActivationKind::kLiffi;
  throw std::invalid_argument("unknown activation: " + name);
}

DerivativeMode parse_derivative_mode(const std::string& name) {
  if (name == "exact") return DerivativeMode::kExact;
  if (name == "surrogate") return DerivativeMode::kSurrogate;
  throw std::invalid_argument("unknown derivative mode: " + name);
}

std::string to_string(ActivationKind kind) {
  return kind == ActivationKind::kRelu ? "relu" : "liffi";
}

std::string to_string(DerivativeMode mode) {
  return mode == DerivativeMode::kExact ? "exact" : "surrogate";
}

}  // namespace eqprop
