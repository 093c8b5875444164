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

#include <doctest.h>

#include <cmath>

#include "eqprop/rate_training.hpp"

using namespace eqprop;

namespace {

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                 double tol = 0.0) {
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

const Activation kRelu(ActivationKind::kRelu, DerivativeMode::kSurrogate, {});

}  // namespace

TEST_CASE("learning rates follow 1/sqrt(indegree)") {
  auto topo = build_topology({2, 3, 2}, true);
  const LearningRates rates = make_learning_rates(*topo, 0.1);
  for (int i = 2; i < 5; ++i) {  // hidden: indegree 2+2+1
    CHECK(rates.per_neuron(i) == doctest::Approx(0.1 / std::sqrt(5.0)));
  }
  for (int i = 5; i < 7; ++i) {  // output: indegree 3+1
    CHECK(rates.per_neuron(i) == doctest::Approx(0.1 / std::sqrt(4.0)));
  }
  CHECK(rates.per_neuron(0) == 0.0);  // inputs have no presynaptic partners
  CHECK(rates.per_neuron(topo->bias_index()) == 0.0);
}

TEST_CASE("forward phase with zero weights gives zero outputs") {
  auto topo = build_topology({2, 3, 2}, false);
  NetworkParams p{topo, Eigen::MatrixXd::Zero(7, 7)};
  PhaseSchedule sched{600.0, 600.0, 1.0, 1.0};
  const PhaseResult fwd = forward_phase(p, Eigen::Vector2d{0.4, 0.9}, sched, kRelu);
  CHECK(std::abs(fwd.state.s(5)) < 1e-9);
  CHECK(std::abs(fwd.state.s(6)) < 1e-9);
  CHECK(fwd.state.s(0) == 0.4);  // stays clamped
  CHECK(fwd.state.s(1) == 0.9);
}

TEST_CASE("chain fixed point matches a damped fixed-point-iteration oracle") {
  // in -> hid -> out chain with w_hid,in = 1 and symmetric hid<->out 0.5,
  // input clamped at 2: jointly s_h = 2 + 0.5 s_o, s_o = 0.5 s_h.
  TopologyOptions opts;
  opts.bias_unit = false;
  auto topo = build_topology({1, 1, 1}, opts);
  NetworkParams p{topo, Eigen::MatrixXd::Zero(3, 3)};
  p.w(1, 0) = 1.0;
  p.w(2, 1) = 0.5;
  p.w(1, 2) = 0.5;

  // Independent oracle: damped iteration of the fixed-point equations.
  double sh = 0.0, so = 0.0;
  for (int it = 0; it < 4000; ++it) {
    const double nh = 0.5 * sh + 0.5 * (1.0 * 2.0 + 0.5 * std::max(so, 0.0));
    const double no = 0.5 * so + 0.5 * (0.5 * std::max(sh, 0.0));
    sh = nh;
    so = no;
  }
  CHECK(std::abs(sh - 8.0 / 3.0) < 1e-10);
  CHECK(std::abs(so - 4.0 / 3.0) < 1e-10);

  PhaseSchedule sched{600.0, 600.0, 1.0, 1.0};
  Eigen::VectorXd x(1);
  x << 2.0;
  RatePhaseOptions popts;
  popts.residual_tol = 1e-12;
  const PhaseResult fwd = forward_phase(p, x, sched, kRelu, popts);
  CHECK(fwd.state.s(1) == doctest::Approx(sh).epsilon(1e-8));
  CHECK(fwd.state.s(2) == doctest::Approx(so).epsilon(1e-8));
  CHECK(fwd.report.final_residual < 1e-6);
}

TEST_CASE("forward residual is reported and small on toy networks") {
  auto topo = build_topology({2, 8, 2}, true);
  PhaseSchedule sched{600.0, 600.0, 1.0, 1.0};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(RngSpec{400 + seed, 0});
    const NetworkParams p = init_weights(topo, rng, 1.0);
    Rng srng(RngSpec{400 + seed, 1});
    const PhaseResult fwd = forward_phase(
        p, Eigen::Vector2d{srng.uniform(), srng.uniform()}, sched, kRelu);
    CHECK(fwd.report.final_residual >= 0.0);
    CHECK(fwd.report.final_residual < 1e-6);
  }
}

TEST_CASE("backward phase with matching targets is a no-op") {
  auto topo = build_topology({2, 3, 2}, true);
  Rng rng(RngSpec{21, 0});
  NetworkParams p = init_weights(topo, rng, 0.5);
  PhaseSchedule sched{600.0, 600.0, 1.0, 1.0};
  RatePhaseOptions popts;
  popts.residual_tol = 1e-12;
  const PhaseResult fwd =
      forward_phase(p, Eigen::Vector2d{0.3, 0.8}, sched, kRelu, popts);
  Eigen::VectorXd y(2);
  y << fwd.state.s(5), fwd.state.s(6);
  const PhaseResult bwd = backward_phase(p, fwd.state, y, sched, kRelu, popts);
  CHECK((bwd.state.s - fwd.state.s).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("beta must be positive in the backward phase") {
  auto topo = build_topology({2, 3, 2}, true);
  Rng rng(RngSpec{22, 0});
  NetworkParams p = init_weights(topo, rng, 0.1);
  PhaseSchedule sched{600.0, 600.0, 0.0, 1.0};  // beta = 0
  PhaseSchedule good{600.0, 600.0, 1.0, 1.0};
  const PhaseResult fwd = forward_phase(p, Eigen::Vector2d{0.3, 0.8}, good, kRelu);
  CHECK_THROWS_AS(
      backward_phase(p, fwd.state, Eigen::Vector2d{0.5, 0.5}, sched, kRelu),
      std::invalid_argument);
}

TEST_CASE("nudge displacement scales linearly in beta") {
  auto topo = build_topology({2, 4, 2}, true);
  Rng rng(RngSpec{23, 0});
  NetworkParams p = init_weights(topo, rng, 0.8);
  PhaseSchedule base{600.0, 3000.0, 1.0, 1.0};
  RatePhaseOptions popts;
  popts.residual_tol = 1e-12;
  const PhaseResult fwd =
      forward_phase(p, Eigen::Vector2d{0.6, 0.2}, base, kRelu, popts);
  const Eigen::Vector2d y{0.9, 0.1};

  PhaseSchedule s1 = base;
  s1.beta = 1e-2;
  PhaseSchedule s2 = base;
  s2.beta = 5e-3;
  const PhaseResult b1 = backward_phase(p, fwd.state, y, s1, kRelu, popts);
  const PhaseResult b2 = backward_phase(p, fwd.state, y, s2, kRelu, popts);
  const double d1 = (b1.state.s - fwd.state.s).norm();
  const double d2 = (b2.state.s - fwd.state.s).norm();
  CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.2));  // halving beta halves it
}

TEST_CASE("small-beta nudge moves outputs toward the target") {
  auto topo = build_topology({2, 4, 2}, true);
  Rng rng(RngSpec{29, 0});
  NetworkParams p = init_weights(topo, rng, 0.8);
  PhaseSchedule sched{600.0, 2000.0, 1e-3, 1.0};
  RatePhaseOptions popts;
  popts.residual_tol = 1e-11;
  const PhaseResult fwd =
      forward_phase(p, Eigen::Vector2d{0.5, 0.7}, sched, kRelu, popts);
  const Eigen::Vector2d y{0.8, 0.2};
  const PhaseResult bwd = backward_phase(p, fwd.state, y, sched, kRelu, popts);
  for (int i = 0; i < 2; ++i) {
    const double before = std::abs(y(i) - fwd.state.s(5 + i));
    const double after = std::abs(y(i) - bwd.state.s(5 + i));
    CHECK(after <= before + 1e-9);
  }
}

TEST_CASE("contrastive update arithmetic") {
  TopologyOptions opts;
  opts.bias_unit = false;
  opts.input_feedback = true;
  auto topo = build_topology({1, 1}, opts);
  NetworkParams p{topo, Eigen::MatrixXd::Zero(2, 2)};

  LearningRates uniform;
  uniform.eta_base = 0.1;
  uniform.per_neuron = Eigen::VectorXd::Constant(2, 0.1);

  RateState star;
  star.s = Eigen::VectorXd::Ones(2);  // rho = (1, 1)
  star.s_hat = Eigen::VectorXd::Zero(2);
  RateState beta = star;
  beta.s << 2.0, 3.0;  // rho = (2, 3)

  NetworkParams updated = p;
  apply_contrastive_update(updated, star, beta, kRelu, uniform);
  // eta (rho_i^b rho_j^b - rho_i* rho_j*) = 0.1 (6 - 1) = 0.5, both directions.
  CHECK(updated.w(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(updated.w(1, 0) == doctest::Approx(0.5).epsilon(1e-15));

  // Identical states produce exactly zero change.
  NetworkParams frozen = p;
  apply_contrastive_update(frozen, star, star, kRelu, uniform);
  CHECK(same_matrix(frozen.w, p.w));
}

TEST_CASE("update rows scale as eta_base/sqrt(indegree)") {
  auto topo = build_topology({2, 3, 2}, true);
  Rng rng(RngSpec{31, 0});
  NetworkParams p = init_weights(topo, rng, 0.5);
  const LearningRates rates = make_learning_rates(*topo, 0.1);
  PhaseSchedule sched{600.0, 600.0, 1.0, 1.0};
  const PhaseResult fwd = forward_phase(p, Eigen::Vector2d{0.7, 0.4}, sched, kRelu);
  const PhaseResult bwd =
      backward_phase(p, fwd.state, Eigen::Vector2d{0.9, 0.2}, sched, kRelu);

  NetworkParams updated = p;
  apply_contrastive_update(updated, fwd.state, bwd.state, kRelu, rates);
  const Eigen::MatrixXd delta = updated.w - p.w;
  // Hidden->output (row 5, col 2) vs output->hidden (row 2, col 5): the
  // underlying correlation difference is symmetric, so the ratio of the two
  // entries is exactly eta_5/eta_2.
  const double expected = rates.per_neuron(5) / rates.per_neuron(2);
  if (std::abs(delta(2, 5)) > 1e-14) {
    CHECK(delta(5, 2) / delta(2, 5) == doctest::Approx(expected).epsilon(1e-9));
  }
  // Uniform rates make the update symmetric (on a symmetric mask).
  TopologyOptions sopts;
  sopts.bias_unit = false;
  sopts.input_feedback = true;
  auto stopo = build_topology({2, 3, 2}, sopts);
  Rng srng(RngSpec{32, 0});
  NetworkParams sp = init_weights(stopo, srng, 0.5);
  const PhaseResult sfwd = forward_phase(sp, Eigen::Vector2d{0.7, 0.4}, sched, kRelu);
  const PhaseResult sbwd =
      backward_phase(sp, sfwd.state, Eigen::Vector2d{0.9, 0.2}, sched, kRelu);
  LearningRates uniform;
  uniform.eta_base = 0.1;
  uniform.per_neuron = Eigen::VectorXd::Constant(stopo->size(), 0.1);
  NetworkParams sym = sp;
  apply_contrastive_update(sym, sfwd.state, sbwd.state, kRelu, uniform);
  const Eigen::MatrixXd dsym = sym.w - sp.w;
  CHECK(same_matrix(dsym, dsym.transpose().eval(), 1e-15));
}

TEST_CASE("online subtract-then-add equals the batched update") {
  auto topo = build_topology({2, 3, 2}, true);
  Rng rng(RngSpec{37, 0});
  NetworkParams p = init_weights(topo, rng, 0.5);
  const LearningRates rates = make_learning_rates(*topo, 0.1);
  PhaseSchedule sched{600.0, 600.0, 1.0, 1.0};
  const PhaseResult fwd = forward_phase(p, Eigen::Vector2d{0.2, 0.9}, sched, kRelu);
  const PhaseResult bwd =
      backward_phase(p, fwd.state, Eigen::Vector2d{0.4, 0.6}, sched, kRelu);

  NetworkParams batched = p;
  apply_contrastive_update(batched, fwd.state, bwd.state, kRelu, rates);

  NetworkParams online = p;
  const Eigen::VectorXd rho_star = rho_vector(fwd.state.s, online, kRelu);
  const Eigen::VectorXd rho_beta = rho_vector(bwd.state.s, online, kRelu);
  apply_correlation_update(online, rho_star, rates, -1.0);
  apply_correlation_update(online, rho_beta, rates, +1.0);

  CHECK(same_matrix(batched.w, online.w, 1e-12));
}

TEST_CASE("train_epoch input validation and zero-learning-rate freeze") {
  auto topo = build_topology({2, 3, 2}, true);
  Rng rng(RngSpec{41, 0});
  NetworkParams p = init_weights(topo, rng, 0.1);
  const LearningRates zero = make_learning_rates(*topo, 0.0);
  PhaseSchedule sched{60.0, 60.0, 1.0, 1.0};
  Rng sampler(RngSpec{41, 1});

  CHECK_THROWS_AS(train_epoch(p, sampler, sched, zero, 0, kRelu, {}, nullptr),
                  std::invalid_argument);

  const Eigen::MatrixXd before = p.w;
  std::vector<double> train_errors;
  RateTrainOptions topts;
  train_epoch(p, sampler, sched, zero, 5, kRelu, topts,
              [&](const MetricsRecord& r) {
                REQUIRE(r.train_error.has_value());
                train_errors.push_back(*r.train_error);
              });
  CHECK(same_matrix(p.w, before));
  REQUIRE(train_errors.size() == 5);
}

TEST_CASE("evaluate agrees with a one-line oracle over stored predictions") {
  auto topo = build_topology({2, 3, 2}, true);
  NetworkParams p{topo, Eigen::MatrixXd::Zero(8, 8)};
  p.w(5, 7) = 0.5;  // bias -> first output
  p.w(6, 7) = 0.5;  // bias -> second output
  PhaseSchedule sched{600.0, 600.0, 1.0, 1.0};

  const auto eval_set = grid(4);
  const auto preds = predict(p, eval_set, sched, kRelu);
  for (const auto& pr : preds) {
    CHECK(pr(0) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(pr(1) == doctest::Approx(0.5).epsilon(1e-6));
  }
  double oracle = 0.0;
  for (std::size_t i = 0; i < eval_set.size(); ++i) {
    oracle += (preds[i] - eval_set[i].target()).norm();
  }
  oracle /= static_cast<double>(eval_set.size());
  CHECK(evaluate(p, eval_set, sched, kRelu) == doctest::Approx(oracle).epsilon(1e-14));

  // Constant predictor at (0.5, 0.5) vs the (0,0) corner target (1, 0.5).
  const std::vector<TaskSample> corner{make_sample(0.0, 0.0)};
  CHECK(evaluate(p, corner, sched, kRelu) == doctest::Approx(0.5).epsilon(1e-6));

  CHECK_THROWS_AS(evaluate(p, {}, sched, kRelu), std::invalid_argument);
}
