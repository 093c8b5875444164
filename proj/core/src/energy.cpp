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

#include "eqprop/energy.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "eqprop/csv.hpp"

namespace eqprop {

namespace {

void check_dims(const RateState& state, const NetworkParams& params) {
  const int n = params.topology->size();
  if (state.s.size() != n || state.s_hat.size() != n) {
    throw std::invalid_argument("rate state dimension mismatch with topology");
  }
}

}  // namespace

Eigen::VectorXd rho_vector(const Eigen::VectorXd& s, const NetworkParams& params,
                           const Activation& act, double bias_activation) {
  const auto& topo = *params.topology;
  Eigen::VectorXd rho(s.size());
  for (int i = 0; i < s.size(); ++i) rho(i) = act.rho(s(i));
  if (topo.has_bias()) rho(topo.bias_index()) = bias_activation;
  return rho;
}

double energy(const RateState& state, const NetworkParams& params,
              const Activation& act, double bias_activation) {
  check_dims(state, params);
  const auto& topo = *params.topology;
  const Eigen::VectorXd rho = rho_vector(state.s, params, act, bias_activation);

  double twice_e = state.s.squaredNorm();
  twice_e -= rho.dot(params.w * rho);  // diagonal is zero by the mask

  for (int i = 0; i < topo.size(); ++i) {
    const double d = state.s_hat(i) - state.s(i);
    if (topo.is_input(i) && !state.clamp_input) twice_e += state.beta_x * d * d;
    if (topo.is_output(i)) twice_e += state.beta_y * d * d;
  }
  return twice_e / 2.0;
}

Eigen::VectorXd energy_gradient(const RateState& state,
                                const NetworkParams& params,
                                const Activation& act, double bias_activation) {
  check_dims(state, params);
  const auto& topo = *params.topology;
  const Eigen::VectorXd rho = rho_vector(state.s, params, act, bias_activation);
  const Eigen::VectorXd coupling =
      0.5 * (params.w * rho + params.w.transpose() * rho);

  Eigen::VectorXd grad(topo.size());
  for (int i = 0; i < topo.size(); ++i) {
    if (topo.is_bias(i) || (topo.is_input(i) && state.clamp_input)) {
      grad(i) = 0.0;
      continue;
    }
    double g = state.s(i) - act.rho_prime(state.s(i)) * coupling(i);
    const double d = state.s_hat(i) - state.s(i);
    if (topo.is_input(i)) g -= state.beta_x * d;
    if (topo.is_output(i)) g -= state.beta_y * d;
    grad(i) = g;
  }
  return grad;
}

Eigen::VectorXd dynamics_rhs(const RateState& state, const NetworkParams& params,
                             const Activation& act, double bias_activation) {
  check_dims(state, params);
  const auto& topo = *params.topology;
  const Eigen::VectorXd rho = rho_vector(state.s, params, act, bias_activation);
  const Eigen::VectorXd drive = params.w * rho;

  Eigen::VectorXd rhs(topo.size());
  for (int i = 0; i < topo.size(); ++i) {
    if (topo.is_bias(i) || (topo.is_input(i) && state.clamp_input)) {
      rhs(i) = 0.0;
      continue;
    }
    double r = -state.s(i) + act.rho_prime(state.s(i)) * drive(i);
    const double d = state.s_hat(i) - state.s(i);
    if (topo.is_input(i)) r += state.beta_x * d;
    if (topo.is_output(i)) r += state.beta_y * d;
    rhs(i) = r;
  }
  return rhs;
}

RelaxReport relax(RateState& state, const NetworkParams& params,
                  const Activation& act, const RelaxOptions& opts,
                  double bias_activation) {
  if (opts.dt <= 0.0) throw std::invalid_argument("relax: dt must be > 0");
  if (opts.duration < opts.dt) {
    throw std::invalid_argument("relax: duration must be >= dt");
  }
  check_dims(state, params);

  const auto& topo = *params.topology;
  const double step = opts.dt / act.constants().tau;
  const long n_steps = std::lround(opts.duration / opts.dt);

  RelaxReport report;
  for (long k = 0; k < n_steps; ++k) {
    const Eigen::VectorXd rhs = dynamics_rhs(state, params, act, bias_activation);
    const double residual = rhs.lpNorm<Eigen::Infinity>();
    if (opts.residual_tol > 0.0 && residual < opts.residual_tol) {
      report.final_residual = residual;
      return report;
    }
    state.s += step * rhs;
    for (int i = 0; i < topo.size(); ++i) {
      if (topo.is_bias(i) || (topo.is_input(i) && state.clamp_input)) continue;
      if (state.s(i) < 0.0) state.s(i) = 0.0;
      if (!std::isfinite(state.s(i)) ||
          std::abs(state.s(i)) > opts.divergence_limit) {
        std::ostringstream msg;
        msg << "relaxation diverged at step " << k << " (t=" << (k + 1) * opts.dt
            << " ms), neuron " << i << ": s=" << state.s(i);
        throw DivergenceError(msg.str(), k);
      }
    }
    ++report.steps_taken;
    if (opts.record_energy) {
      report.energy_trace.push_back(energy(state, params, act, bias_activation));
      report.residual_trace.push_back(
          dynamics_rhs(state, params, act, bias_activation)
              .lpNorm<Eigen::Infinity>());
    }
  }
  report.final_residual = dynamics_rhs(state, params, act, bias_activation)
                              .lpNorm<Eigen::Infinity>();
  return report;
}

void write_energy_trace_csv(const RelaxReport& report, const std::string& path) {
  if (report.energy_trace.empty() ||
      report.energy_trace.size() != report.residual_trace.size()) {
    throw std::invalid_argument("energy trace was not recorded");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "step,energy,residual\n";
  for (std::size_t k = 0; k < report.energy_trace.size(); ++k) {
    out << (k + 1) << ',' << format_double(report.energy_trace[k]) << ','
        << format_double(report.residual_trace[k]) << '\n';
  }
}

}  // namespace eqprop
