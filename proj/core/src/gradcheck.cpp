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

#include "eqprop/gradcheck.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace eqprop {

namespace {

Activation exact_relu() {
  return Activation(ActivationKind::kRelu, DerivativeMode::kExact,
                    NeuronConstants{});
}

RelaxOptions tight_relax(const GradcheckOptions& opts) {
  RelaxOptions ro;
  ro.dt = opts.relax_dt;
  ro.duration = opts.relax_t_max;
  ro.residual_tol = opts.residual_tol;
  return ro;
}

RateState clamped_state(const NetworkParams& params, const Eigen::VectorXd& x,
                        double s_init) {
  const auto& topo = *params.topology;
  if (x.size() != topo.input_count()) {
    throw std::invalid_argument("gradcheck: input dimension mismatch");
  }
  RateState st;
  st.s = Eigen::VectorXd::Constant(topo.size(), s_init);
  st.s_hat = Eigen::VectorXd::Zero(topo.size());
  for (int i = 0; i < topo.input_count(); ++i) {
    st.s(i) = x(i);
    st.s_hat(i) = x(i);
  }
  st.clamp_input = true;
  st.beta_y = 0.0;
  return st;
}

/// Relax to the free fixed point (beta_y = 0), warm-startable.
RateState free_fixed_point(const NetworkParams& params, const Eigen::VectorXd& x,
                           const GradcheckOptions& opts,
                           const RateState* warm_start = nullptr) {
  RateState st = warm_start ? *warm_start : clamped_state(params, x, opts.s_init);
  st.beta_y = 0.0;
  const Activation act = exact_relu();
  const RelaxReport rep = relax(st, params, act, tight_relax(opts));
  if (rep.final_residual >= opts.residual_tol) {
    throw std::runtime_error("gradcheck: relaxation did not reach residual tolerance");
  }
  return st;
}

RateState nudged_fixed_point(const NetworkParams& params, const RateState& s_star,
                             const Eigen::VectorXd& y_hat, double beta,
                             const GradcheckOptions& opts) {
  const auto& topo = *params.topology;
  RateState st = s_star;
  st.beta_y = beta;
  for (int i = 0; i < topo.output_count(); ++i) {
    st.s_hat(topo.output_begin() + i) = y_hat(i);
  }
  const Activation act = exact_relu();
  const RelaxReport rep = relax(st, params, act, tight_relax(opts));
  if (rep.final_residual >= opts.residual_tol) {
    throw std::runtime_error("gradcheck: nudged relaxation did not converge");
  }
  return st;
}

std::vector<int> free_indices(const NetworkTopology& topo) {
  std::vector<int> idx;
  for (int i = 0; i < topo.size(); ++i) {
    if (!topo.is_input(i) && !topo.is_bias(i)) idx.push_back(i);
  }
  return idx;
}

}  // namespace

double cost(const RateState& state, const Eigen::VectorXd& y_hat,
            const NetworkTopology& topology) {
  if (y_hat.size() != topology.output_count()) {
    throw std::invalid_argument("cost: target dimension mismatch");
  }
  double twice_c = 0.0;
  for (int i = 0; i < topology.output_count(); ++i) {
    const double d = y_hat(i) - state.s(topology.output_begin() + i);
    twice_c += d * d;
  }
  return twice_c / 2.0;
}

Eigen::VectorXd cost_gradient(const RateState& state,
                              const Eigen::VectorXd& y_hat,
                              const NetworkTopology& topology) {
  if (y_hat.size() != topology.output_count()) {
    throw std::invalid_argument("cost_gradient: target dimension mismatch");
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(topology.size());
  for (int i = 0; i < topology.output_count(); ++i) {
    const int idx = topology.output_begin() + i;
    g(idx) = state.s(idx) - y_hat(i);
  }
  return g;
}

Eigen::MatrixXd oracle_grad(const NetworkParams& params,
                            const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y_hat,
                            const GradcheckOptions& opts) {
  const auto& topo = *params.topology;
  if (topo.size() > 20) {
    throw std::invalid_argument(
        "oracle_grad: brute force is limited to networks of <= 20 neurons");
  }
  if (!topo.mask().isApprox(topo.mask().transpose())) {
    throw std::invalid_argument("oracle_grad: requires a symmetric mask");
  }
  const RateState base = free_fixed_point(params, x, opts);
  const double h = opts.weight_step;

  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(topo.size(), topo.size());
  NetworkParams perturbed = params;
  for (int i = 0; i < topo.size(); ++i) {
    for (int j = i + 1; j < topo.size(); ++j) {
      if (!topo.connected(i, j)) continue;
      perturbed.w = params.w;
      perturbed.w(i, j) += h;
      perturbed.w(j, i) += h;
      const RateState plus = free_fixed_point(perturbed, x, opts, &base);
      const double c_plus = cost(plus, y_hat, topo);
      perturbed.w = params.w;
      perturbed.w(i, j) -= h;
      perturbed.w(j, i) -= h;
      const RateState minus = free_fixed_point(perturbed, x, opts, &base);
      const double c_minus = cost(minus, y_hat, topo);
      const double g = (c_plus - c_minus) / (2.0 * h);
      grad(i, j) = g;
      grad(j, i) = g;
    }
  }
  return grad;
}

Eigen::MatrixXd contrastive_estimate(const NetworkParams& params,
                                     const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& y_hat, double beta,
                                     const GradcheckOptions& opts) {
  if (beta <= 0.0) {
    throw std::invalid_argument("contrastive_estimate: beta must be > 0");
  }
  const Activation act = exact_relu();
  const RateState s_star = free_fixed_point(params, x, opts);
  const RateState s_beta = nudged_fixed_point(params, s_star, y_hat, beta, opts);
  const Eigen::VectorXd rho_star = rho_vector(s_star.s, params, act);
  const Eigen::VectorXd rho_beta = rho_vector(s_beta.s, params, act);
  const Eigen::MatrixXd outer = (rho_beta * rho_beta.transpose() -
                                 rho_star * rho_star.transpose()) /
                                beta;
  return outer.cwiseProduct(params.topology->mask());
}

LambdaCheckResult lambda_check(const NetworkParams& params,
                               const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y_hat,
                               const GradcheckOptions& opts) {
  const auto& topo = *params.topology;
  const Activation act = exact_relu();
  const RateState s_star = free_fixed_point(params, x, opts);
  const RateState s_beta =
      nudged_fixed_point(params, s_star, y_hat, opts.lambda_beta, opts);

  const std::vector<int> free = free_indices(topo);
  const int m = static_cast<int>(free.size());

  LambdaCheckResult out;
  out.lambda_hat = Eigen::VectorXd(m);
  for (int a = 0; a < m; ++a) {
    out.lambda_hat(a) =
        (s_beta.s(free[a]) - s_star.s(free[a])) / opts.lambda_beta;
  }

  // Finite-difference Hessian of the energy over free coordinates, built
  // from the analytic gradient (itself validated against the energy by
  // finite differences in the test suite).
  const double h = opts.state_step;
  Eigen::MatrixXd hessian(m, m);
  RateState probe = s_star;
  for (int a = 0; a < m; ++a) {
    probe.s = s_star.s;
    probe.s(free[a]) = s_star.s(free[a]) + h;
    const Eigen::VectorXd g_plus = energy_gradient(probe, params, act);
    probe.s(free[a]) = s_star.s(free[a]) - h;
    const Eigen::VectorXd g_minus = energy_gradient(probe, params, act);
    for (int b = 0; b < m; ++b) {
      hessian(b, a) = (g_plus(free[b]) - g_minus(free[b])) / (2.0 * h);
    }
  }
  hessian = ((hessian + hessian.transpose()) / 2.0).eval();

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian);
  out.hessian_min_eig = eig.eigenvalues().minCoeff();
  out.ill_conditioned = out.hessian_min_eig < 1e-8;

  const Eigen::VectorXd dc = cost_gradient(s_star, y_hat, topo);
  Eigen::VectorXd dc_free(m);
  for (int a = 0; a < m; ++a) dc_free(a) = dc(free[a]);

  out.cost_grad_norm = dc_free.lpNorm<Eigen::Infinity>();
  out.residual =
      (dc_free + hessian * out.lambda_hat).lpNorm<Eigen::Infinity>();
  return out;
}

GradcheckInstance make_gradcheck_instance(const std::vector<int>& layer_sizes,
                                          Rng& rng,
                                          const GradcheckOptions& opts) {
  TopologyOptions topts;
  topts.bias_unit = false;
  topts.input_feedback = true;  // symmetric mask, required by the derivation
  auto topo = build_topology(layer_sizes, topts);

  for (int attempt = 0; attempt < 200; ++attempt) {
    NetworkParams params = init_weights(topo, rng, 0.5);
    // Tilt the couplings positive so fixed points land inside the positive
    // orthant; purely negative-drive neurons would sit on the activation
    // kink where finite differences are meaningless.
    for (int i = 0; i < topo->size(); ++i) {
      for (int j = 0; j < topo->size(); ++j) {
        if (topo->connected(i, j)) params.w(i, j) = 0.1 + std::abs(params.w(i, j));
      }
    }
    params.symmetrize();

    Eigen::VectorXd x(topo->input_count());
    for (int i = 0; i < x.size(); ++i) x(i) = rng.uniform(0.3, 1.0);
    Eigen::VectorXd y_hat(topo->output_count());
    for (int i = 0; i < y_hat.size(); ++i) y_hat(i) = rng.uniform(0.1, 0.9);

    try {
      const RateState s_star = free_fixed_point(params, x, opts);
      bool interior = true;
      for (int i : free_indices(*topo)) {
        if (s_star.s(i) < 0.05) interior = false;
      }
      if (!interior) continue;
      const LambdaCheckResult lc = lambda_check(params, x, y_hat, opts);
      if (lc.ill_conditioned) continue;
      return GradcheckInstance{std::move(params), std::move(x), std::move(y_hat)};
    } catch (const std::runtime_error&) {
      continue;  // non-convergent draw, try again
    }
  }
  throw std::runtime_error("make_gradcheck_instance: no usable instance in 200 draws");
}

GradcheckReport run_gradcheck(int n_instances, std::uint64_t seed,
                              const GradcheckThresholds& thresholds,
                              const GradcheckOptions& opts) {
  if (n_instances < 1) {
    throw std::invalid_argument("run_gradcheck: need at least one instance");
  }
  GradcheckReport report;
  report.pass = true;

  for (int inst = 0; inst < n_instances; ++inst) {
    Rng rng(RngSpec{seed, 100 + static_cast<std::uint64_t>(inst)});
    const GradcheckInstance gi = make_gradcheck_instance({2, 3, 2}, rng, opts);
    const Eigen::MatrixXd oracle = oracle_grad(gi.params, gi.x, gi.y_hat, opts);
    const double oracle_norm = oracle.norm();

    GradcheckInstanceReport ir;
    for (double beta : thresholds.beta_grid) {
      const Eigen::MatrixXd est =
          contrastive_estimate(gi.params, gi.x, gi.y_hat, beta, opts);
      const Eigen::MatrixXd neg_est = -est;
      ir.rel_error[beta] = (neg_est - oracle).norm() / oracle_norm;
      const double denom = neg_est.norm() * oracle_norm;
      ir.cosine[beta] =
          denom > 0.0 ? (neg_est.cwiseProduct(oracle)).sum() / denom : 0.0;
    }

    const LambdaCheckResult lc = lambda_check(gi.params, gi.x, gi.y_hat, opts);
    ir.lambda_residual = lc.residual;
    ir.lambda_residual_bound =
        thresholds.lambda_residual_factor * lc.cost_grad_norm;
    ir.hessian_min_eig = lc.hessian_min_eig;

    bool pass = true;
    if (ir.cosine.count(thresholds.cosine_beta) &&
        ir.cosine.at(thresholds.cosine_beta) < thresholds.cosine_min) {
      pass = false;
    }
    const auto& grid = thresholds.beta_grid;
    for (std::size_t b = 1; b < grid.size(); ++b) {
      if (ir.rel_error.at(grid[b]) >
          ir.rel_error.at(grid[b - 1]) * thresholds.trend_slack) {
        pass = false;
      }
    }
    if (grid.size() >= 2 &&
        ir.rel_error.at(grid.back()) >= ir.rel_error.at(grid.front())) {
      pass = false;
    }
    if (ir.rel_error.at(grid.back()) > thresholds.final_rel_err_max) pass = false;
    if (ir.lambda_residual > ir.lambda_residual_bound) pass = false;

    ir.pass = pass;
    report.pass = report.pass && pass;
    report.instances.push_back(std::move(ir));
  }
  return report;
}

nlohmann::json to_json(const GradcheckReport& report) {
  nlohmann::json j;
  j["pass"] = report.pass;
  j["instances"] = nlohmann::json::array();
  for (const auto& ir : report.instances) {
    nlohmann::json ji;
    nlohmann::json errs = nlohmann::json::array();
    for (const auto& [beta, err] : ir.rel_error) {
      errs.push_back({{"beta", beta},
                      {"rel_error", err},
                      {"cosine", ir.cosine.at(beta)}});
    }
    ji["beta_sweep"] = std::move(errs);
    ji["lambda_residual"] = ir.lambda_residual;
    ji["lambda_residual_bound"] = ir.lambda_residual_bound;
    ji["hessian_min_eig"] = ir.hessian_min_eig;
    ji["pass"] = ir.pass;
    j["instances"].push_back(std::move(ji));
  }
  return j;
}

}  // namespace eqprop
