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
#include <utility>
#include <vector>

#include "eqprop/activation.hpp"
#include "eqprop/metrics.hpp"
#include "eqprop/rate_training.hpp"
#include "eqprop/task.hpp"

namespace eqprop {

/// Convex mixing coefficient between recurrent drive and the external
/// nudging current: lambda = RI / (RI + syn_drive) when the denominator is
/// positive, 0 otherwise (the formula presumes positive drives).
inline double nudging_factor(double external_drive, double synaptic_drive) {
  const double denom = external_drive + synaptic_drive;
  if (external_drive <= 0.0 || denom <= 0.0) return 0.0;
  return external_drive / denom;
}

/// Population coding: each real-valued dimension is represented by
/// neurons_per_dim neurons receiving identical current.
struct PopulationCode {
  int neurons_per_dim = 20;
  int input_dims = 2;
  int output_dims = 2;

  int input_neurons() const { return neurons_per_dim * input_dims; }
  int output_neurons() const { return neurons_per_dim * output_dims; }
};

/// Monotone map between a coded value v in [0,1] and the steady firing rate
/// liffi(u_0 + R*v) of an isolated neuron driven by current v. Decoding
/// inverts it on a 101-point grid by linear interpolation, clamped to [0,1].
/// Built once per experiment so encode and decode stay mutually consistent.
class RateCalibration {
 public:
  explicit RateCalibration(const NeuronConstants& k, int grid_points = 101);

  double rate_of_value(double v) const;
  double value_of_rate(double rate) const;

 private:
  std::vector<double> values_;
  std::vector<double> rates_;
};

/// Per-neuron spiking state. refract_left counts remaining refractory steps;
/// spike times are reported through StepRecorder rather than stored here.
struct SpikingState {
  Eigen::VectorXd u;         ///< membrane potentials
  Eigen::VectorXd syn;       ///< post-synaptic traces s_j
  Eigen::VectorXd rate_est;  ///< slow rate-estimate traces r_i
  Eigen::VectorXi refract_left;
  double t_now = 0.0;
  long step_index = 0;
};

SpikingState make_spiking_state(const NetworkTopology& topology,
                                const NeuronConstants& k);

/// Optional observer: spike raster and a single-neuron probe trace.
struct StepRecorder {
  bool record_spikes = false;
  int probe_neuron = -1;

  std::vector<std::pair<int, double>> spikes;  ///< (neuron, time ms)
  struct ProbeRow {
    double t, u, syn, rate_est, current;
  };
  std::vector<ProbeRow> probe;
};

/// One Euler step of the whole network:
///   tau u' = -u + u_0 + (1 - lambda) * (W syn) + lambda * R I
/// for non-refractory neurons, threshold crossing (u >= theta) -> spike,
/// reset to u_r and hold for delta; then
///   tau_r r' = -r + syn   and   tau_s syn' = -syn,
/// with each spike adding u_psp/tau_s to its syn trace (unit impulse area).
void step_spiking(SpikingState& state, const NetworkParams& params,
                  const NeuronConstants& k, const Eigen::VectorXd& ext_current,
                  double dt, StepRecorder* recorder = nullptr);

/// Identical currents within each input population group; values in [0,1].
Eigen::VectorXd encode_input(const Eigen::Vector2d& sample,
                             const PopulationCode& code);

/// Target values as currents over the output populations, same convention.
Eigen::VectorXd encode_target(const Eigen::Vector2d& target,
                              const PopulationCode& code);

/// Mean rate estimate per output group mapped back through the calibration.
Eigen::Vector2d decode_output(const SpikingState& state,
                              const PopulationCode& code,
                              const NetworkTopology& topology,
                              const NeuronConstants& k,
                              const RateCalibration& calibration);

struct SpikingTrialOptions {
  bool reset_traces = true;  ///< start each trial from rest
  double bias_current = 1.0; ///< constant drive of the bias unit
};

struct TrialResult {
  Eigen::Vector2d prediction;
  double train_error = 0.0;
  double forward_residual = 0.0;  ///< rate-estimate drift at forward-phase end
  double t_subtract = 0.0;        ///< trial-local time of the -eta r- r- update
  double t_add = 0.0;             ///< trial-local time of the +eta r+ r+ update
};

/// One two-phase trial: forward simulation under input currents only, then
/// w -= eta r- r-^T; backward simulation with target currents added, then
/// w += eta r+ r+^T. The prediction is decoded at the forward-phase end.
TrialResult run_trial(NetworkParams& params, SpikingState& state,
                      const TaskSample& sample, const PhaseSchedule& schedule,
                      const NeuronConstants& k, const LearningRates& rates,
                      const PopulationCode& code,
                      const RateCalibration& calibration,
                      const SpikingTrialOptions& opts = {},
                      StepRecorder* recorder = nullptr);

struct SpikingTrainOptions {
  SpikingTrialOptions trial;
  int eval_every = 0;  ///< evaluate every k trials (and at the end); 0 = never
  std::vector<TaskSample> eval_set;
  long sample_index_offset = 0;
  /// External trial state, used when traces carry over between trials and
  /// across checkpoint resumes. Owned by the caller; nullptr = internal.
  SpikingState* state = nullptr;
};

/// Iterates run_trial over uniformly drawn samples; evaluation runs the
/// forward phase only (no target currents, no weight updates) on fresh
/// states. Emits one MetricsRecord per trial.
void train_spiking(NetworkParams& params, Rng& sampler,
                   const PhaseSchedule& schedule, const NeuronConstants& k,
                   const LearningRates& rates, const PopulationCode& code,
                   long n_samples, const SpikingTrainOptions& opts,
                   const MetricsSink& sink);

/// Forward-only predictions for an evaluation set.
std::vector<Eigen::Vector2d> predict_spiking(
    const NetworkParams& params, const std::vector<TaskSample>& samples,
    const PhaseSchedule& schedule, const NeuronConstants& k,
    const PopulationCode& code, const RateCalibration& calibration,
    const SpikingTrialOptions& opts = {});

double evaluate_spiking(const NetworkParams& params,
                        const std::vector<TaskSample>& samples,
                        const PhaseSchedule& schedule, const NeuronConstants& k,
                        const PopulationCode& code,
                        const RateCalibration& calibration,
                        const SpikingTrialOptions& opts = {});

/// Empirical firing rate (spikes per ms) of one neuron under constant total
/// drive v, using the same Euler/threshold/refractory stepping as the
/// network simulation. Drives the f-I curve checks and the fi-curve tool.
double lif_rate_empirical(double v, const NeuronConstants& k, double dt,
                          double duration_ms);

}  // namespace eqprop
