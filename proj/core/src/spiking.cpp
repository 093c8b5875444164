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

#include "eqprop/spiking.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace eqprop {

namespace {

long refractory_steps(const NeuronConstants& k, double dt) {
  return std::lround(k.delta / dt);
}

/// Membrane Euler update plus threshold/reset. Shared between the network
/// step and the single-neuron rate measurement so both discretize
/// identically. Returns true when the neuron fired.
inline bool membrane_step(double& u, double v_total, double dt_over_tau,
                          const NeuronConstants& k) {
  u += dt_over_tau * (v_total - u);
  if (u >= k.theta) {
    u = k.u_reset;
    return true;
  }
  return false;
}

void check_unit_range(const Eigen::Vector2d& v, const char* what) {
  for (int i = 0; i < 2; ++i) {
    if (!(v(i) >= 0.0 && v(i) <= 1.0)) {
      throw std::invalid_argument(std::string(what) +
                                  ": values must lie in [0,1]");
    }
  }
}

}  // namespace

RateCalibration::RateCalibration(const NeuronConstants& k, int grid_points) {
  if (grid_points < 2) {
    throw std::invalid_argument("calibration: need at least 2 grid points");
  }
  values_.resize(grid_points);
  rates_.resize(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    values_[i] = static_cast<double>(i) / (grid_points - 1);
    rates_[i] = liffi(k.u_rest + k.resistance * values_[i], k);
  }
  for (std::size_t i = 1; i < rates_.size(); ++i) {
    if (rates_[i] <= rates_[i - 1] && values_[i] > 0.0 && rates_[i] > 0.0) {
      throw std::logic_error("calibration: rate map is not increasing");
    }
  }
}

double RateCalibration::rate_of_value(double v) const {
  if (v <= values_.front()) return rates_.front();
  if (v >= values_.back()) return rates_.back();
  const auto it = std::upper_bound(values_.begin(), values_.end(), v);
  const std::size_t hi = it - values_.begin();
  const double t = (v - values_[hi - 1]) / (values_[hi] - values_[hi - 1]);
  return rates_[hi - 1] + t * (rates_[hi] - rates_[hi - 1]);
}

double RateCalibration::value_of_rate(double rate) const {
  if (rate <= rates_.front()) return values_.front();
  if (rate >= rates_.back()) return values_.back();
  const auto it = std::upper_bound(rates_.begin(), rates_.end(), rate);
  const std::size_t hi = it - rates_.begin();
  const double span = rates_[hi] - rates_[hi - 1];
  const double t = span > 0.0 ? (rate - rates_[hi - 1]) / span : 0.0;
  return values_[hi - 1] + t * (values_[hi] - values_[hi - 1]);
}

SpikingState make_spiking_state(const NetworkTopology& topology,
                                const NeuronConstants& k) {
  SpikingState st;
  const int n = topology.size();
  st.u = Eigen::VectorXd::Constant(n, k.u_reset);
  st.syn = Eigen::VectorXd::Zero(n);
  st.rate_est = Eigen::VectorXd::Zero(n);
  st.refract_left = Eigen::VectorXi::Zero(n);
  return st;
}

void step_spiking(SpikingState& state, const NetworkParams& params,
                  const NeuronConstants& k, const Eigen::VectorXd& ext_current,
                  double dt, StepRecorder* recorder) {
  if (dt <= 0.0) throw std::invalid_argument("step_spiking: dt must be > 0");
  const int n = params.topology->size();
  if (state.u.size() != n || ext_current.size() != n) {
    throw std::invalid_argument("step_spiking: dimension mismatch");
  }
  for (int i = 0; i < n; ++i) {
    if (ext_current(i) < 0.0) {
      throw std::invalid_argument("step_spiking: external currents must be >= 0");
    }
  }

  const Eigen::VectorXd syn_drive = params.w * state.syn;
  const double dt_over_tau = dt / k.tau;
  const long n_ref = refractory_steps(k, dt);
  const double t_next = state.t_now + dt;

  std::vector<int> fired;
  for (int i = 0; i < n; ++i) {
    if (state.refract_left(i) > 0) {
      --state.refract_left(i);
      continue;
    }
    const double external = k.resistance * ext_current(i);
    const double lambda = nudging_factor(external, syn_drive(i));
    const double v_total =
        k.u_rest + (1.0 - lambda) * syn_drive(i) + lambda * external;
    if (membrane_step(state.u(i), v_total, dt_over_tau, k)) {
      state.refract_left(i) = static_cast<int>(n_ref);
      fired.push_back(i);
      if (recorder && recorder->record_spikes) {
        recorder->spikes.emplace_back(i, t_next);
      }
    }
    if (!std::isfinite(state.u(i)) || std::abs(state.u(i)) > 1e9) {
      std::ostringstream msg;
      msg << "spiking state diverged at step " << state.step_index
          << " (t=" << t_next << " ms), neuron " << i << ": u=" << state.u(i);
      throw DivergenceError(msg.str(), state.step_index);
    }
  }

  // Traces: the rate estimate filters syn(t); spikes detected this step add
  // their impulse to syn afterwards.
  state.rate_est += (dt / k.tau_r) * (state.syn - state.rate_est);
  state.syn -= (dt / k.tau_s) * state.syn;
  for (int j : fired) state.syn(j) += k.u_psp / k.tau_s;

  state.t_now = t_next;
  ++state.step_index;

  if (recorder && recorder->probe_neuron >= 0 && recorder->probe_neuron < n) {
    const int p = recorder->probe_neuron;
    recorder->probe.push_back({state.t_now, state.u(p), state.syn(p),
                               state.rate_est(p), ext_current(p)});
  }
}

Eigen::VectorXd encode_input(const Eigen::Vector2d& sample,
                             const PopulationCode& code) {
  check_unit_range(sample, "encode_input");
  Eigen::VectorXd currents(code.input_neurons());
  for (int d = 0; d < code.input_dims; ++d) {
    for (int i = 0; i < code.neurons_per_dim; ++i) {
      currents(d * code.neurons_per_dim + i) = sample(d);
    }
  }
  return currents;
}

Eigen::VectorXd encode_target(const Eigen::Vector2d& target,
                              const PopulationCode& code) {
  check_unit_range(target, "encode_target");
  Eigen::VectorXd currents(code.output_neurons());
  for (int d = 0; d < code.output_dims; ++d) {
    for (int i = 0; i < code.neurons_per_dim; ++i) {
      currents(d * code.neurons_per_dim + i) = target(d);
    }
  }
  return currents;
}

Eigen::Vector2d decode_output(const SpikingState& state,
                              const PopulationCode& code,
                              const NetworkTopology& topology,
                              const NeuronConstants& k,
                              const RateCalibration& calibration) {
  if (topology.output_count() != code.output_neurons()) {
    throw std::invalid_argument("decode_output: population/topology mismatch");
  }
  Eigen::Vector2d out;
  for (int d = 0; d < code.output_dims; ++d) {
    double mean_r = 0.0;
    for (int i = 0; i < code.neurons_per_dim; ++i) {
      mean_r +=
          state.rate_est(topology.output_begin() + d * code.neurons_per_dim + i);
    }
    mean_r /= code.neurons_per_dim;
    const double rate = mean_r / k.u_psp;
    out(d) = std::clamp(calibration.value_of_rate(rate), 0.0, 1.0);
  }
  return out;
}

namespace {

Eigen::VectorXd assemble_currents(const NetworkTopology& topo,
                                  const PopulationCode& code,
                                  const Eigen::VectorXd& input_currents,
                                  const Eigen::VectorXd* target_currents,
                                  double bias_current) {
  Eigen::VectorXd currents = Eigen::VectorXd::Zero(topo.size());
  currents.head(code.input_neurons()) = input_currents;
  if (target_currents) {
    currents.segment(topo.output_begin(), code.output_neurons()) =
        *target_currents;
  }
  if (topo.has_bias()) currents(topo.bias_index()) = bias_current;
  return currents;
}

void simulate_phase(SpikingState& state, const NetworkParams& params,
                    const NeuronConstants& k, const Eigen::VectorXd& currents,
                    double duration, double dt, StepRecorder* recorder) {
  const long n_steps = std::lround(duration / dt);
  for (long s = 0; s < n_steps; ++s) {
    step_spiking(state, params, k, currents, dt, recorder);
  }
}

}  // namespace

TrialResult run_trial(NetworkParams& params, SpikingState& state,
                      const TaskSample& sample, const PhaseSchedule& schedule,
                      const NeuronConstants& k, const LearningRates& rates,
                      const PopulationCode& code,
                      const RateCalibration& calibration,
                      const SpikingTrialOptions& opts, StepRecorder* recorder) {
  schedule.validate();
  const auto& topo = *params.topology;
  if (topo.input_count() != code.input_neurons()) {
    throw std::invalid_argument("run_trial: population/topology mismatch");
  }
  if (opts.reset_traces) {
    state = make_spiking_state(topo, k);
  }
  state.t_now = 0.0;
  state.step_index = 0;

  const Eigen::VectorXd input_currents = encode_input(sample.input(), code);
  const Eigen::VectorXd fwd_currents =
      assemble_currents(topo, code, input_currents, nullptr, opts.bias_current);
  simulate_phase(state, params, k, fwd_currents, schedule.t_forward,
                 schedule.dt, recorder);

  TrialResult result;
  result.prediction = decode_output(state, code, topo, k, calibration);
  result.train_error = (result.prediction - sample.target()).norm();
  result.forward_residual =
      ((state.syn - state.rate_est) / k.tau_r).lpNorm<Eigen::Infinity>();

  const Eigen::VectorXd r_minus = state.rate_est;
  apply_correlation_update(params, r_minus, rates, -1.0);
  result.t_subtract = state.t_now;

  const Eigen::VectorXd target_currents = encode_target(sample.target(), code);
  const Eigen::VectorXd bwd_currents = assemble_currents(
      topo, code, input_currents, &target_currents, opts.bias_current);
  simulate_phase(state, params, k, bwd_currents, schedule.t_backward,
                 schedule.dt, recorder);

  const Eigen::VectorXd r_plus = state.rate_est;
  apply_correlation_update(params, r_plus, rates, +1.0);
  result.t_add = state.t_now;
  return result;
}

void train_spiking(NetworkParams& params, Rng& sampler,
                   const PhaseSchedule& schedule, const NeuronConstants& k,
                   const LearningRates& rates, const PopulationCode& code,
                   long n_samples, const SpikingTrainOptions& opts,
                   const MetricsSink& sink) {
  if (n_samples < 1) {
    throw std::invalid_argument("train_spiking: n_samples must be >= 1");
  }
  const RateCalibration calibration(k);
  SpikingState local_state = make_spiking_state(*params.topology, k);
  SpikingState& state = opts.state ? *opts.state : local_state;

  for (long t = 1; t <= n_samples; ++t) {
    const long index = opts.sample_index_offset + t;
    const TaskSample sample = make_sample(sampler.uniform(), sampler.uniform());
    try {
      const TrialResult trial =
          run_trial(params, state, sample, schedule, k, rates, code,
                    calibration, opts.trial);
      MetricsRecord rec;
      rec.sample_index = index;
      rec.forward_residual = trial.forward_residual;
      rec.train_error = trial.train_error;
      const bool do_eval = opts.eval_every > 0 && !opts.eval_set.empty() &&
                           (index % opts.eval_every == 0 || t == n_samples);
      if (do_eval) {
        rec.eval_error = evaluate_spiking(params, opts.eval_set, schedule, k,
                                          code, calibration, opts.trial);
      }
      if (sink) sink(rec);
    } catch (const DivergenceError& e) {
      std::ostringstream msg;
      msg << "training trial " << index << ": " << e.what();
      throw DivergenceError(msg.str(), e.step);
    }
  }
}

std::vector<Eigen::Vector2d> predict_spiking(
    const NetworkParams& params, const std::vector<TaskSample>& samples,
    const PhaseSchedule& schedule, const NeuronConstants& k,
    const PopulationCode& code, const RateCalibration& calibration,
    const SpikingTrialOptions& opts) {
  const auto& topo = *params.topology;
  std::vector<Eigen::Vector2d> preds;
  preds.reserve(samples.size());
  for (const auto& sample : samples) {
    SpikingState state = make_spiking_state(topo, k);
    const Eigen::VectorXd currents = assemble_currents(
        topo, code, encode_input(sample.input(), code), nullptr,
        opts.bias_current);
    simulate_phase(state, params, k, currents, schedule.t_forward, schedule.dt,
                   nullptr);
    preds.push_back(decode_output(state, code, topo, k, calibration));
  }
  return preds;
}

double evaluate_spiking(const NetworkParams& params,
                        const std::vector<TaskSample>& samples,
                        const PhaseSchedule& schedule, const NeuronConstants& k,
                        const PopulationCode& code,
                        const RateCalibration& calibration,
                        const SpikingTrialOptions& opts) {
  if (samples.empty()) {
    throw std::invalid_argument("evaluate_spiking: empty eval set");
  }
  return euclid_error(
      predict_spiking(params, samples, schedule, k, code, calibration, opts),
      targets_of(samples));
}

double lif_rate_empirical(double v, const NeuronConstants& k, double dt,
                          double duration_ms) {
  if (dt <= 0.0 || duration_ms <= 0.0) {
    throw std::invalid_argument("lif_rate_empirical: dt and duration must be > 0");
  }
  const double dt_over_tau = dt / k.tau;
  const long n_ref = refractory_steps(k, dt);
  const long n_steps = std::lround(duration_ms / dt);
  double u = k.u_reset;
  long refract_left = 0;
  long spikes = 0;
  for (long s = 0; s < n_steps; ++s) {
    if (refract_left > 0) {
      --refract_left;
      continue;
    }
    if (membrane_step(u, v, dt_over_tau, k)) {
      refract_left = n_ref;
      ++spikes;
    }
  }
  return static_cast<double>(spikes) / duration_ms;
}

}  // namespace eqprop
