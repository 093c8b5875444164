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

namespace eqprop {

/// Neuron model constants. Times are in ms, potentials in the dimensionless
/// units used throughout; defaults are the rate-model experiment values.
struct NeuronConstants {
  double tau = 15.0;      ///< membrane time constant
  double u_rest = 20.0;   ///< resting potential u_0
  double u_reset = 0.0;   ///< post-spike reset potential u_r
  double theta = 20.0;    ///< spike threshold
  double delta = 5.0;     ///< refractory period
  double tau_s = 10.0;    ///< synaptic trace time constant
  double tau_r = 300.0;   ///< rate-estimate trace time constant
  double u_psp = 400.0;   ///< post-synaptic response amplitude
  double resistance = 40.0;  ///< membrane resistance R

  void validate() const;
};

}  // namespace eqprop
