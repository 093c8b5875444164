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
#include <map>
#include <nlohmann/json_fwd.hpp>
#include <vector>

#include "eqprop/rate_training.hpp"

namespace eqprop {

/// Quadratic output cost C = 1/2 sum_{i in Y} (y_hat_i - s_i)^2.
double cost(const RateState& state, const Eigen::VectorXd& y_hat,
            const NetworkTopology& topology);

/// dC/ds: s_i - y_hat_i on the output set, 0 elsewhere.
Eigen::VectorXd cost_gradient(const RateState& state,
                              const Eigen::VectorXd& y_hat,
                              const NetworkTopology& topology);

/// Numerical settings for the gradient validation. Everything runs with the
/// rectified-linear activation, exact derivatives and hard input clamping,
/// on topologies whose mask is fully symmetric (the derivation assumes
/// w_ij = w_ji, so instances are symmetrized and weight perturbations move
/// w_ij and w_ji together as one parameter).
struct GradcheckOptions {
  double weight_step = 1e-5;  ///< finite-difference step for dC/dw
  double state_step = 1e-6;   ///< finite-difference step for the Hessian
  double relax_dt = 7.5;      ///< tau/2 with the default tau = 15
  double relax_t_max = 2e5;   ///< cap on relaxation length (ms)
  double residual_tol = 1e-10;
  double lambda_beta = 1e-4;  ///< beta used for the lambda identification
  double s_init = 0.1;
};

/// Brute-force dC/dw: for every masked symmetric pair {i, j}, perturb
/// w_ij = w_ji by +/-h, re-relax to the free fixed point, and take the
/// central difference of the cost. Returned as a full (symmetric) matrix on
/// the mask. Networks above ~20 neurons are rejected.
Eigen::MatrixXd oracle_grad(const NetworkParams& params,
                            const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y_hat,
                            const GradcheckOptions& opts = {});

/// (rho(s^beta) rho(s^beta)^T - rho(s*) rho(s*)^T) / beta on masked entries,
/// both phases relaxed to opts.residual_tol. Sign convention: the negated
/// estimate approximates dC/dw, so following +estimate descends the cost.
Eigen::MatrixXd contrastive_estimate(const NetworkParams& params,
                                     const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& y_hat, double beta,
                                     const GradcheckOptions& opts = {});

struct LambdaCheckResult {
  Eigen::VectorXd lambda_hat;  ///< (s^beta - s*) / beta over free neurons
  double residual = 0.0;       ///< inf-norm of dC/ds + H lambda_hat
  double cost_grad_norm = 0.0; ///< inf-norm of dC/ds over free neurons
  double hessian_min_eig = 0.0;
  bool ill_conditioned = false;
};

/// Verifies the stationarity condition dC/ds + H lambda = 0 at the free
/// fixed point, with H the finite-difference Hessian of the energy and
/// lambda estimated as the beta-sensitivity of the nudged fixed point.
LambdaCheckResult lambda_check(const NetworkParams& params,
                               const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y_hat,
                               const GradcheckOptions& opts = {});

struct GradcheckInstance {
  NetworkParams params;
  Eigen::VectorXd x;
  Eigen::VectorXd y_hat;
};

/// Random symmetric-weight instance on a fully symmetric layered mask, with
/// all free fixed-point states strictly positive (resampled otherwise) so
/// finite differences stay away from the activation kink.
GradcheckInstance make_gradcheck_instance(const std::vector<int>& layer_sizes,
                                          Rng& rng,
                                          const GradcheckOptions& opts = {});

struct GradcheckThresholds {
  std::vector<double> beta_grid{1e-1, 1e-2, 1e-3};
  double cosine_beta = 1e-2;
  double cosine_min = 0.99;
  double final_rel_err_max = 0.05;
  double trend_slack = 1.10;  ///< err may wiggle up by 10% per beta decade
  double lambda_residual_factor = 1e-3;
};

struct GradcheckInstanceReport {
  std::map<double, double> rel_error;  ///< beta -> |estimate - oracle| / |oracle|
  std::map<double, double> cosine;     ///< beta -> cosine(-estimate, oracle)
  double lambda_residual = 0.0;
  double lambda_residual_bound = 0.0;
  double hessian_min_eig = 0.0;
  bool pass = false;
};

struct GradcheckReport {
  std::vector<GradcheckInstanceReport> instances;
  bool pass = false;
};

/// Full validation over n random 2-3-2 instances.
GradcheckReport run_gradcheck(int n_instances, std::uint64_t seed,
                              const GradcheckThresholds& thresholds = {},
                              const GradcheckOptions& opts = {});

nlohmann::json to_json(const GradcheckReport& report);

}  // namespace eqprop
