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
#include <vector>

#include "eqprop/energy.hpp"
#include "eqprop/metrics.hpp"
#include "eqprop/task.hpp"

namespace eqprop {

/// Two-phase timing: relax t_forward with beta_y = 0, then t_backward with
/// beta_y = beta. The 1/beta factor of the gradient estimate is absorbed
/// into the learning rate.
struct PhaseSchedule {
  double t_forward = 600.0;
  double t_backward = 600.0;
  double beta = 1.0;
  double dt = 1.0;

  void validate() const;
};

/// Per-neuron learning rates eta_i = eta_base / sqrt(indegree_i)
/// (0 for neurons with no inputs).
struct LearningRates {
  double eta_base = 0.0;
  Eigen::VectorXd per_neuron;
};

LearningRates make_learning_rates(const NetworkTopology& topology,
                                  double eta_base);

enum class UpdateMode { kBatched, kOnline };
UpdateMode parse_update_mode(const std::string& name);
std::string to_string(UpdateMode mode);

struct RatePhaseOptions {
  double s_init = 0.1;           ///< initial value of free states
  double bias_activation = 1.0;  ///< pinned firing rate of the bias unit
  double residual_tol = 0.0;     ///< early-stop tolerance; 0 = fixed duration
  bool record_energy = false;    ///< fill RelaxReport energy/residual traces
};

struct PhaseResult {
  RateState state;
  RelaxReport report;
};

/// Relax to the free fixed point with inputs clamped to x and beta_y = 0.
PhaseResult forward_phase(const NetworkParams& params, const Eigen::VectorXd& x,
                          const PhaseSchedule& schedule, const Activation& act,
                          const RatePhaseOptions& opts = {});

/// Continue from s_star with beta_y = schedule.beta > 0 and targets y_hat on
/// the output set. Full relaxation is not required; the phase runs for
/// t_backward (or until opts.residual_tol).
PhaseResult backward_phase(const NetworkParams& params, const RateState& s_star,
                           const Eigen::VectorXd& y_hat,
                           const PhaseSchedule& schedule, const Activation& act,
                           const RatePhaseOptions& opts = {});

/// w_ij += sign * eta_i * r_i * r_j on masked entries. The +/- halves of the
/// contrastive rule and the online spiking updates all route through here.
void apply_correlation_update(NetworkParams& params, const Eigen::VectorXd& r,
                              const LearningRates& rates, double sign);

/// Contrastive update w_ij += eta_i (rho(s^beta_i) rho(s^beta_j)
///                                   - rho(s*_i) rho(s*_j)), masked.
void apply_contrastive_update(NetworkParams& params, const RateState& s_star,
                              const RateState& s_beta, const Activation& act,
                              const LearningRates& rates,
                              double bias_activation = 1.0);

struct RateTrainOptions {
  UpdateMode update_mode = UpdateMode::kBatched;
  RatePhaseOptions phase;
  int eval_every = 0;  ///< evaluate on eval_set every k samples (and at the end); 0 = never
  std::vector<TaskSample> eval_set;
  long sample_index_offset = 0;  ///< base index when resuming
};

/// One pass of n_samples two-phase updates; samples are drawn uniformly from
/// the task via `sampler`. Emits one MetricsRecord per sample. Divergence
/// aborts with the failing sample index in the message.
void train_epoch(NetworkParams& params, Rng& sampler,
                 const PhaseSchedule& schedule, const LearningRates& rates,
                 long n_samples, const Activation& act,
                 const RateTrainOptions& opts, const MetricsSink& sink);

/// Forward-phase predictions (output-neuron states at the fixed point).
std::vector<Eigen::Vector2d> predict(const NetworkParams& params,
                                     const std::vector<TaskSample>& samples,
                                     const PhaseSchedule& schedule,
                                     const Activation& act,
                                     const RatePhaseOptions& opts = {});

/// Mean Euclidean distance between forward-phase predictions and targets.
double evaluate(const NetworkParams& params,
                const std::vector<TaskSample>& samples,
                const PhaseSchedule& schedule, const Activation& act,
                const RatePhaseOptions& opts = {});

}  // namespace eqprop
