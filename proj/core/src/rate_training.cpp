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

#include "eqprop/rate_training.hpp"

#include <cmath>
#include <sstream>

namespace eqprop {

void PhaseSchedule::validate() const {
  if (t_forward <= 0.0) throw std::invalid_argument("schedule: t_forward must be > 0");
  if (t_backward <= 0.0) throw std::invalid_argument("schedule: t_backward must be > 0");
  if (beta <= 0.0) throw std::invalid_argument("schedule: beta must be > 0");
  if (dt <= 0.0) throw std::invalid_argument("schedule: dt must be > 0");
}

LearningRates make_learning_rates(const NetworkTopology& topology,
                                  double eta_base) {
  if (eta_base < 0.0) throw std::invalid_argument("eta_base must be >= 0");
  LearningRates r;
  r.eta_base = eta_base;
  r.per_neuron = Eigen::VectorXd::Zero(topology.size());
  for (int i = 0; i < topology.size(); ++i) {
    const int deg = topology.indegree()(i);
    if (deg > 0) r.per_neuron(i) = eta_base / std::sqrt(static_cast<double>(deg));
  }
  return r;
}

UpdateMode parse_update_mode(const std::string& name) {
  if (name == "batched") return UpdateMode::kBatched;
  if (name == "online") return UpdateMode::kOnline;
  throw std::invalid_argument("unknown update mode: " + name);
}

std::string to_string(UpdateMode mode) {
  return mode == UpdateMode::kBatched ? "batched" : "online";
}

namespace {

RateState make_forward_state(const NetworkParams& params,
                             const Eigen::VectorXd& x,
                             const RatePhaseOptions& opts) {
  const auto& topo = *params.topology;
  if (x.size() != topo.input_count()) {
    throw std::invalid_argument("forward_phase: input dimension mismatch");
  }
  RateState st;
  st.s = Eigen::VectorXd::Constant(topo.size(), opts.s_init);
  st.s_hat = Eigen::VectorXd::Zero(topo.size());
  for (int i = 0; i < topo.input_count(); ++i) {
    st.s(i) = x(i);
    st.s_hat(i) = x(i);
  }
  if (topo.has_bias()) st.s(topo.bias_index()) = 1.0;
  st.clamp_input = true;
  st.beta_y = 0.0;
  return st;
}

}  // namespace

PhaseResult forward_phase(const NetworkParams& params, const Eigen::VectorXd& x,
                          const PhaseSchedule& schedule, const Activation& act,
                          const RatePhaseOptions& opts) {
  schedule.validate();
  PhaseResult out;
  out.state = make_forward_state(params, x, opts);
  RelaxOptions ro;
  ro.dt = schedule.dt;
  ro.duration = schedule.t_forward;
  ro.residual_tol = opts.residual_tol;
  ro.record_energy = opts.record_energy;
  out.report = relax(out.state, params, act, ro, opts.bias_activation);
  return out;
}

PhaseResult backward_phase(const NetworkParams& params, const RateState& s_star,
                           const Eigen::VectorXd& y_hat,
                           const PhaseSchedule& schedule, const Activation& act,
                           const RatePhaseOptions& opts) {
  schedule.validate();
  const auto& topo = *params.topology;
  if (y_hat.size() != topo.output_count()) {
    throw std::invalid_argument("backward_phase: target dimension mismatch");
  }
  PhaseResult out;
  out.state = s_star;
  out.state.beta_y = schedule.beta;
  for (int i = 0; i < topo.output_count(); ++i) {
    out.state.s_hat(topo.output_begin() + i) = y_hat(i);
  }
  RelaxOptions ro;
  ro.dt = schedule.dt;
  ro.duration = schedule.t_backward;
  ro.residual_tol = opts.residual_tol;
  ro.record_energy = opts.record_energy;
  out.report = relax(out.state, params, act, ro, opts.bias_activation);
  return out;
}

void apply_correlation_update(NetworkParams& params, const Eigen::VectorXd& r,
                              const LearningRates& rates, double sign) {
  const Eigen::MatrixXd delta =
      (rates.per_neuron.asDiagonal() * (r * r.transpose())) * sign;
  params.add_masked(delta);
}

void apply_contrastive_update(NetworkParams& params, const RateState& s_star,
                              const RateState& s_beta, const Activation& act,
                              const LearningRates& rates,
                              double bias_activation) {
  const Eigen::VectorXd rho_star =
      rho_vector(s_star.s, params, act, bias_activation);
  const Eigen::VectorXd rho_beta =
      rho_vector(s_beta.s, params, act, bias_activation);
  const Eigen::MatrixXd delta =
      rates.per_neuron.asDiagonal() *
      (rho_beta * rho_beta.transpose() - rho_star * rho_star.transpose());
  params.add_masked(delta);
}

void train_epoch(NetworkParams& params, Rng& sampler,
                 const PhaseSchedule& schedule, const LearningRates& rates,
                 long n_samples, const Activation& act,
                 const RateTrainOptions& opts, const MetricsSink& sink) {
  if (n_samples < 1) throw std::invalid_argument("train_epoch: n_samples must be >= 1");
  schedule.validate();
  const auto& topo = *params.topology;
  if (topo.output_count() != 2) {
    throw std::invalid_argument("train_epoch: the task needs 2 output neurons");
  }

  for (long k = 1; k <= n_samples; ++k) {
    const long index = opts.sample_index_offset + k;
    const TaskSample sample = make_sample(sampler.uniform(), sampler.uniform());
    try {
      const PhaseResult fwd = forward_phase(params, sample.input(), schedule,
                                            act, opts.phase);
      Eigen::Vector2d pred;
      pred << fwd.state.s(topo.output_begin()),
          fwd.state.s(topo.output_begin() + 1);
      MetricsRecord rec;
      rec.sample_index = index;
      rec.forward_residual = fwd.report.final_residual;
      rec.train_error = (pred - sample.target()).norm();

      if (opts.update_mode == UpdateMode::kOnline) {
        const Eigen::VectorXd rho_star =
            rho_vector(fwd.state.s, params, act, opts.phase.bias_activation);
        apply_correlation_update(params, rho_star, rates, -1.0);
        const PhaseResult bwd = backward_phase(params, fwd.state,
                                               sample.target(), schedule, act,
                                               opts.phase);
        const Eigen::VectorXd rho_beta =
            rho_vector(bwd.state.s, params, act, opts.phase.bias_activation);
        apply_correlation_update(params, rho_beta, rates, +1.0);
      } else {
        const PhaseResult bwd = backward_phase(params, fwd.state,
                                               sample.target(), schedule, act,
                                               opts.phase);
        apply_contrastive_update(params, fwd.state, bwd.state, act, rates,
                                 opts.phase.bias_activation);
      }

      const bool do_eval =
          opts.eval_every > 0 && !opts.eval_set.empty() &&
          (index % opts.eval_every == 0 || k == n_samples);
      if (do_eval) {
        rec.eval_error =
            evaluate(params, opts.eval_set, schedule, act, opts.phase);
      }
      if (sink) sink(rec);
    } catch (const DivergenceError& e) {
      std::ostringstream msg;
      msg << "training sample " << index << ": " << e.what();
      throw DivergenceError(msg.str(), e.step);
    }
  }
}

std::vector<Eigen::Vector2d> predict(const NetworkParams& params,
                                     const std::vector<TaskSample>& samples,
                                     const PhaseSchedule& schedule,
                                     const Activation& act,
                                     const RatePhaseOptions& opts) {
  const auto& topo = *params.topology;
  if (topo.output_count() != 2) {
    throw std::invalid_argument("predict: the task needs 2 output neurons");
  }
  std::vector<Eigen::Vector2d> preds;
  preds.reserve(samples.size());
  for (const auto& sample : samples) {
    const PhaseResult fwd =
        forward_phase(params, sample.input(), schedule, act, opts);
    preds.emplace_back(fwd.state.s(topo.output_begin()),
                       fwd.state.s(topo.output_begin() + 1));
  }
  return preds;
}

double evaluate(const NetworkParams& params,
                const std::vector<TaskSample>& samples,
                const PhaseSchedule& schedule, const Activation& act,
                const RatePhaseOptions& opts) {
  if (samples.empty()) throw std::invalid_argument("evaluate: empty eval set");
  return euclid_error(predict(params, samples, schedule, act, opts),
                      targets_of(samples));
}

}  // namespace eqprop
