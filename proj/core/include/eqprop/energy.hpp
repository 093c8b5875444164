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

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqprop/activation.hpp"
#include "eqprop/params.hpp"

namespace eqprop {

/// Rate-model state. Inputs are either hard-clamped (s_i pinned to s_hat_i,
/// the beta_x -> infinity limit) or softly coupled with weight beta_x;
/// outputs are softly coupled with weight beta_y. s_hat is only meaningful
/// on the input and output index sets.
struct RateState {
  Eigen::VectorXd s;
  Eigen::VectorXd s_hat;
  bool clamp_input = true;
  double beta_x = 0.0;  ///< used only when !clamp_input
  double beta_y = 0.0;
};

struct RelaxOptions {
  double dt = 1.0;           ///< Euler step (ms)
  double duration = 600.0;   ///< phase length (ms)
  double residual_tol = 0.0; ///< early stop when the residual drops below; <= 0 disables
  bool record_energy = false;
  double divergence_limit = 1e6;
};

struct RelaxReport {
  long steps_taken = 0;
  double final_residual = 0.0;  ///< inf-norm of the dynamics rhs over free neurons
  std::vector<double> energy_trace;    ///< per applied step, when recorded
  std::vector<double> residual_trace;  ///< ditto
};

/// Thrown when a state exceeds the divergence guard or goes non-finite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long step)
      : std::runtime_error(what), step(step) {}
  long step;
};

/// Scalar energy
///   2E = sum_i s_i^2 - sum_{i != j} w_ij rho(s_i) rho(s_j)
///        + beta_x sum_X (s_hat - s)^2 + beta_y sum_Y (s_hat - s)^2,
/// with the bias unit's activation pinned to bias_activation so its weight
/// column realizes the bias terms. The beta_x term is dropped in clamped
/// input mode (its limit form).
double energy(const RateState& state, const NetworkParams& params,
              const Activation& act, double bias_activation = 1.0);

/// Exact gradient dE/ds over all coordinates (entries for clamped inputs and
/// the bias unit are reported as 0). Uses the symmetrized coupling
/// (w + w^T)/2, which is the true derivative of `energy` for any w.
Eigen::VectorXd energy_gradient(const RateState& state,
                                const NetworkParams& params,
                                const Activation& act,
                                double bias_activation = 1.0);

/// Neural dynamics tau * ds_i/dt:
///   -s_i + rho'(s_i) (sum_j w_ij rho(s_j)) + [i in X] beta_x (s_hat - s)
///        + [i in Y] beta_y (s_hat - s),
/// with clamped inputs and the bias unit pinned (their entries forced to 0).
/// Coincides with -energy_gradient when w is symmetric.
Eigen::VectorXd dynamics_rhs(const RateState& state, const NetworkParams& params,
                             const Activation& act, double bias_activation = 1.0);

/// Forward-Euler relaxation s <- s + (dt/tau) * rhs. Free states are floored
/// at 0 after each step (both activations have rho = 0, rho' = 0 below
/// zero, so the continuous flow never leaves s >= 0; the floor removes the
/// Euler overshoot). Throws DivergenceError on non-finite or runaway states.
RelaxReport relax(RateState& state, const NetworkParams& params,
                  const Activation& act, const RelaxOptions& opts,
                  double bias_activation = 1.0);

/// rho applied elementwise with the bias-unit override.
Eigen::VectorXd rho_vector(const Eigen::VectorXd& s, const NetworkParams& params,
                           const Activation& act, double bias_activation = 1.0);

/// CSV dump of a recorded relaxation: columns step,energy,residual.
void write_energy_trace_csv(const RelaxReport& report, const std::string& path);

}  // namespace eqprop
