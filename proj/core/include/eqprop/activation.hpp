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

#pragma once

#include <string>

#include "eqprop/neuron_constants.hpp"

namespace eqprop {

inline double relu(double s) { return s > 0.0 ? s : 0.0; }
inline double relu_prime(double s) { return s > 0.0 ? 1.0 : 0.0; }

/// Firing rate (spikes per ms) of a leaky integrate-and-fire neuron under
/// constant total drive v:
///   f(v) = 1 / (tau * ln((v - u_r)/(v - theta)) + delta)   for v > theta,
///   f(v) = 0                                               otherwise.
/// Strictly increasing above threshold, bounded by 1/delta.
double liffi(double v, const NeuronConstants& k);

/// Piecewise-constant stand-in for the slope of the LIF rate curve:
/// 1 for v > 0, 0 otherwise.
inline double liffi_surrogate_prime(double v) { return v > 0.0 ? 1.0 : 0.0; }

enum class ActivationKind { kRelu, kLiffi };
enum class DerivativeMode { kExact, kSurrogate };

ActivationKind parse_activation_kind(const std::string& name);
DerivativeMode parse_derivative_mode(const std::string& name);
std::string to_string(ActivationKind kind);
std::string to_string(DerivativeMode mode);

/// The rate model's firing-rate function rho(s) and its slope.
///
/// For kLiffi, rho(s) = liffi(u_rest + R*s) / liffi(u_rest + R): states are
/// current-like values in [0,1] (the spiking model's I convention), and the
/// rate is expressed relative to a maximally driven (I = 1) neuron -- the
/// same normalization the population decoder's calibration uses. With
/// u_rest == theta the rate is zero exactly for s <= 0, mirroring the
/// rectified-linear case, and rho(1) = 1. The "exact" liffi slope is a
/// central finite difference (h = 1e-4); the surrogate is the v > 0 step
/// function, which for relu coincides with the true derivative.
class Activation {
 public:
  Activation(ActivationKind kind, DerivativeMode mode, NeuronConstants k)
      : kind_(kind), mode_(mode), k_(k) {
    if (kind_ == ActivationKind::kLiffi) {
      const double unit_rate = liffi(k_.u_rest + k_.resistance, k_);
      if (unit_rate > 0.0) rate_unit_ = unit_rate;
    }
  }

  double rho(double s) const {
    if (kind_ == ActivationKind::kRelu) return relu(s);
    return liffi(k_.u_rest + k_.resistance * s, k_) / rate_unit_;
  }

  double rho_prime(double s) const {
    if (kind_ == ActivationKind::kRelu) return relu_prime(s);
    if (mode_ == DerivativeMode::kSurrogate) return liffi_surrogate_prime(s);
    const double h = 1e-4;
    return (rho(s + h) - rho(s - h)) / (2.0 * h);
  }

  ActivationKind kind() const { return kind_; }
  DerivativeMode mode() const { return mode_; }
  const NeuronConstants& constants() const { return k_; }

 private:
  ActivationKind kind_;
  DerivativeMode mode_;
  NeuronConstants k_;
  double rate_unit_ = 1.0;
};

}  // namespace eqprop
