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

// End-to-end acceptance suite. Each criterion prints exactly one
// [PASS]/[FAIL] line; the process exits non-zero if any criterion fails.
// Thresholds are fixed here, not tuned at runtime.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "eqprop/gradcheck.hpp"
#include "eqprop/runner.hpp"

using namespace eqprop;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// --- 1. Gradient-theory validation --------------------------------------

Outcome criterion_gradient_estimate() {
  const GradcheckReport report = run_gradcheck(20, 7);
  double worst_cos = 1.0, worst_err = 0.0;
  for (const auto& inst : report.instances) {
    worst_cos = std::min(worst_cos, inst.cosine.at(1e-2));
    worst_err = std::max(worst_err, inst.rel_error.at(1e-3));
  }
  return {report.pass, "20 instances: min cosine@beta=1e-2 " + fmt(worst_cos) +
                           " (>= 0.99), max rel err@beta=1e-3 " + fmt(worst_err) +
                           " (<= 0.05), trend monotone"};
}

// --- 2. Lambda identification --------------------------------------------

Outcome criterion_lambda() {
  bool pass = true;
  double worst_ratio = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(RngSpec{7, 100 + seed});
    const GradcheckInstance gi = make_gradcheck_instance({2, 3, 2}, rng);
    const LambdaCheckResult lc = lambda_check(gi.params, gi.x, gi.y_hat);
    if (lc.ill_conditioned) {
      pass = false;
      continue;
    }
    const double ratio = lc.residual / std::max(lc.cost_grad_norm, 1e-300);
    worst_ratio = std::max(worst_ratio, ratio);
    if (lc.residual > 1e-3 * lc.cost_grad_norm) pass = false;
  }

  // Scalar closed form: one clamped input, one free output, H = 1.
  TopologyOptions topts;
  topts.bias_unit = false;
  topts.input_feedback = true;
  auto topo = build_topology({1, 1}, topts);
  NetworkParams p{topo, Eigen::MatrixXd::Zero(2, 2)};
  p.w(1, 0) = 0.8;
  p.w(0, 1) = 0.8;
  Eigen::VectorXd x(1), y(1);
  x << 0.7;
  y << 0.9;
  const LambdaCheckResult scalar = lambda_check(p, x, y);
  const double closed = y(0) - 0.8 * 0.7;
  const double scalar_err = std::abs(scalar.lambda_hat(0) - closed) / std::abs(closed);
  if (scalar_err > 0.01) pass = false;

  return {pass, "max residual ratio " + fmt(worst_ratio) +
                    " (<= 1e-3), scalar case err " + fmt(scalar_err) + " (<= 1%)"};
}

// --- 3. Energy descent ----------------------------------------------------

Outcome criterion_energy_descent() {
  const Activation act(ActivationKind::kRelu, DerivativeMode::kExact, {});
  long violations = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    TopologyOptions topts;
    topts.bias_unit = false;
    topts.input_feedback = true;
    auto topo = build_topology(seed % 2 == 0 ? std::vector<int>{2, 3, 2}
                                             : std::vector<int>{3, 4, 3},
                               topts);
    Rng rng(RngSpec{300, seed});
    NetworkParams p = init_weights(topo, rng, 0.4);
    p.symmetrize();

    RateState st;
    st.s = Eigen::VectorXd(topo->size());
    st.s_hat = Eigen::VectorXd::Zero(topo->size());
    for (int i = 0; i < topo->size(); ++i) st.s(i) = rng.uniform(0.0, 1.5);
    for (int i = 0; i < topo->input_count(); ++i) st.s_hat(i) = st.s(i);
    if (seed % 2 == 1) {
      st.beta_y = 0.8;
      for (int i = 0; i < topo->output_count(); ++i) {
        st.s_hat(topo->output_begin() + i) = rng.uniform(0.0, 1.0);
      }
    }
    RelaxOptions ro;
    ro.dt = 1.0;  // dt = tau/15 with tau = 15 ms
    ro.duration = 300.0;
    ro.record_energy = true;
    const RelaxReport rep = relax(st, p, act, ro);
    for (std::size_t k = 1; k < rep.energy_trace.size(); ++k) {
      const double rise = rep.energy_trace[k] - rep.energy_trace[k - 1];
      worst = std::max(worst, rise);
      if (rise > 1e-9) ++violations;
    }
  }
  return {violations == 0, "100 instances, max per-step energy rise " +
                               fmt(worst) + " (<= 1e-9)"};
}

// --- 4. LIF rate correspondence -------------------------------------------

Outcome criterion_lif_rate() {
  const NeuronConstants k;
  bool pass = true;
  double worst_coarse = 0.0, worst_fine = 0.0;
  for (double v : {25.0, 30.0, 40.0, 60.0}) {
    const double analytic = liffi(v, k);
    const double coarse =
        std::abs(lif_rate_empirical(v, k, 1.0, 100000.0) - analytic) / analytic;
    const double fine =
        std::abs(lif_rate_empirical(v, k, 0.01, 100000.0) - analytic) / analytic;
    worst_coarse = std::max(worst_coarse, coarse);
    worst_fine = std::max(worst_fine, fine);
    if (coarse > 0.10 || fine > 0.01) pass = false;
  }
  return {pass, "max err dt=1ms " + fmt(worst_coarse) + " (<= 0.10), dt=0.01ms " +
                    fmt(worst_fine) + " (<= 0.01)"};
}

// --- 5 & 6. Training runs ---------------------------------------------------

struct TrainSummary {
  double initial_error = 0.0;
  double final_error = 0.0;
};

TrainSummary train_rate(const ExperimentConfig& cfg) {
  auto topo = build_topology(cfg.layer_sizes, cfg.bias);
  Rng wrng(RngSpec{cfg.seed, 0});
  NetworkParams params = init_weights(topo, wrng, cfg.init_scale);
  Rng sampler(RngSpec{cfg.seed, 1});
  const Activation act = cfg.make_activation();
  const LearningRates rates = make_learning_rates(*topo, cfg.eta_base);
  const auto eval_set = grid(cfg.eval_grid);

  TrainSummary s;
  s.initial_error =
      evaluate(params, eval_set, cfg.schedule, act, cfg.make_phase_options());
  RateTrainOptions opts;
  opts.update_mode = cfg.update_mode;
  opts.phase = cfg.make_phase_options();
  train_epoch(params, sampler, cfg.schedule, rates, cfg.n_train_samples, act,
              opts, nullptr);
  s.final_error =
      evaluate(params, eval_set, cfg.schedule, act, cfg.make_phase_options());
  return s;
}

TrainSummary train_spiking_preset(const ExperimentConfig& cfg) {
  auto topo = build_topology(cfg.layer_sizes, cfg.bias);
  Rng wrng(RngSpec{cfg.seed, 0});
  NetworkParams params = init_weights(topo, wrng, cfg.init_scale);
  Rng sampler(RngSpec{cfg.seed, 1});
  const LearningRates rates = make_learning_rates(*topo, cfg.eta_base);
  const PopulationCode code = cfg.make_population_code();
  const RateCalibration calibration(cfg.neuron);
  const auto eval_set = grid(cfg.eval_grid);
  const SpikingTrialOptions trial{cfg.reset_traces, 1.0};

  TrainSummary s;
  s.initial_error = evaluate_spiking(params, eval_set, cfg.schedule, cfg.neuron,
                                     code, calibration, trial);
  SpikingTrainOptions opts;
  opts.trial = trial;
  train_spiking(params, sampler, cfg.schedule, cfg.neuron, rates, code,
                cfg.n_train_samples, opts, nullptr);
  s.final_error = evaluate_spiking(params, eval_set, cfg.schedule, cfg.neuron,
                                   code, calibration, trial);
  return s;
}

Outcome criterion_rate_learning() {
  const TrainSummary relu = train_rate(preset("fig3-relu"));
  const TrainSummary nohidden = train_rate(preset("fig3-nohidden"));
  const TrainSummary liffi = train_rate(preset("fig3-liffi"));

  const bool beats_baseline = relu.final_error < 0.5 * nohidden.final_error;
  const bool relu_learns = relu.final_error * 5.0 <= relu.initial_error;
  const bool liffi_learns = liffi.final_error * 5.0 <= liffi.initial_error;
  return {beats_baseline && relu_learns && liffi_learns,
          "relu " + fmt(relu.initial_error) + "->" + fmt(relu.final_error) +
              ", no-hidden final " + fmt(nohidden.final_error) + " (need < half)" +
              ", liffi " + fmt(liffi.initial_error) + "->" +
              fmt(liffi.final_error) + " (need 5x drop)"};
}

Outcome criterion_spiking_learning() {
  const TrainSummary hidden = train_spiking_preset(preset("fig5-reduced"));
  const TrainSummary nohidden =
      train_spiking_preset(preset("fig5-reduced-nohidden"));
  const bool improves = hidden.final_error * 2.0 <= hidden.initial_error;
  const bool beats = hidden.final_error < nohidden.final_error;
  return {improves && beats,
          "hidden " + fmt(hidden.initial_error) + "->" + fmt(hidden.final_error) +
              " (need 2x drop), no-hidden final " + fmt(nohidden.final_error) +
              " (must beat)"};
}

// --- 7. Determinism ---------------------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Outcome criterion_determinism() {
  ExperimentConfig rate = preset("fig3-relu");
  rate.layer_sizes = {2, 8, 2};
  rate.schedule.t_forward = 100.0;
  rate.schedule.t_backward = 100.0;
  rate.n_train_samples = 8;
  rate.eval_every = 4;
  rate.eval_grid = 4;

  ExperimentConfig spiking = preset("fig5-reduced");
  spiking.neurons_per_dim = 3;
  spiking.layer_sizes = {6, 8, 6};
  spiking.schedule.t_forward = 150.0;
  spiking.schedule.t_backward = 150.0;
  spiking.n_train_samples = 6;
  spiking.eval_every = 3;
  spiking.eval_grid = 4;

  bool pass = true;
  std::string detail;
  for (const auto& [tag, cfg] :
       std::vector<std::pair<std::string, ExperimentConfig>>{
           {"rate", rate}, {"spiking", spiking}}) {
    const fs::path a = fs::path("acceptance_out") / (tag + "_a");
    const fs::path b = fs::path("acceptance_out") / (tag + "_b");
    fs::remove_all(a);
    fs::remove_all(b);
    fs::create_directories(a);
    fs::create_directories(b);
    run_experiment(cfg, a.string(), /*quiet=*/true);
    run_experiment(cfg, b.string(), /*quiet=*/true);
    const bool same = slurp((a / "metrics.csv").string()) ==
                      slurp((b / "metrics.csv").string());
    if (!same) pass = false;
    detail += tag + (same ? " byte-identical; " : " DIFFERS; ");
    fs::remove_all(a);
    fs::remove_all(b);
  }
  fs::remove_all("acceptance_out");
  return {pass, detail};
}

// --- 8. Invariant suites ------------------------------------------------------

Outcome criterion_invariants() {
  std::string detail;
  bool pass = true;

  // Nudging-factor bounds.
  bool lambda_ok = nudging_factor(0.0, 12.0) == 0.0 &&
                   nudging_factor(8.0, 0.0) == 1.0 &&
                   nudging_factor(3.0, -5.0) == 0.0;
  for (double ext = 0.0; ext <= 60.0; ext += 1.5) {
    for (double syn = 0.0; syn <= 60.0; syn += 1.5) {
      if (ext + syn <= 0.0) continue;
      const double l = nudging_factor(ext, syn);
      if (l < 0.0 || l > 1.0) lambda_ok = false;
    }
  }
  pass = pass && lambda_ok;
  detail += std::string("nudging bounds ") + (lambda_ok ? "ok; " : "VIOLATED; ");

  // Refractory spacing on a driven network.
  {
    NeuronConstants k;
    k.tau_s = 15.0;
    k.tau_r = 100.0;
    auto topo = build_topology({4, 6, 4}, true);
    Rng rng(RngSpec{801, 0});
    NetworkParams p = init_weights(topo, rng, 1.0);
    PopulationCode code;
    code.neurons_per_dim = 2;
    SpikingState st = make_spiking_state(*topo, k);
    Eigen::VectorXd currents = Eigen::VectorXd::Zero(topo->size());
    currents.head(4) = encode_input({1.0, 0.9}, code);
    currents(topo->bias_index()) = 1.0;
    StepRecorder rec;
    rec.record_spikes = true;
    const double dt = 1.0;
    for (int s = 0; s < 4000; ++s) step_spiking(st, p, k, currents, dt, &rec);
    std::map<int, double> last;
    bool refract_ok = !rec.spikes.empty();
    for (const auto& [neuron, t] : rec.spikes) {
      const auto it = last.find(neuron);
      if (it != last.end() && t - it->second < k.delta - dt / 2.0) {
        refract_ok = false;
      }
      last[neuron] = t;
    }
    pass = pass && refract_ok;
    detail += std::string("refractory spacing ") + (refract_ok ? "ok; " : "VIOLATED; ");
  }

  // Mask preservation through both training rules.
  {
    bool mask_ok = true;
    auto topo = build_topology({2, 5, 2}, true);
    Rng rng(RngSpec{802, 0});
    NetworkParams p = init_weights(topo, rng, 1.0);
    const Activation act(ActivationKind::kRelu, DerivativeMode::kSurrogate, {});
    const LearningRates rates = make_learning_rates(*topo, 0.1);
    PhaseSchedule sched{100.0, 100.0, 1.0, 1.0};
    Rng sampler(RngSpec{802, 1});
    RateTrainOptions opts;
    train_epoch(p, sampler, sched, rates, 5, act, opts, nullptr);
    mask_ok = mask_ok && p.max_mask_violation() == 0.0;

    NeuronConstants k;
    k.tau_s = 15.0;
    k.tau_r = 100.0;
    PopulationCode code;
    code.neurons_per_dim = 2;
    auto stopo = build_topology({4, 6, 4}, true);
    Rng srng(RngSpec{803, 0});
    NetworkParams sp = init_weights(stopo, srng, 0.5);
    const Eigen::MatrixXd before = sp.w;
    const LearningRates srates = make_learning_rates(*stopo, 1e-3);
    const RateCalibration cal(k);
    SpikingState st = make_spiking_state(*stopo, k);
    run_trial(sp, st, make_sample(0.8, 0.2), PhaseSchedule{200.0, 200.0, 1.0, 1.0},
              k, srates, code, cal);
    mask_ok = mask_ok && sp.max_mask_violation() == 0.0;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < stopo->size(); ++j) {
        if (sp.w(i, j) != before(i, j)) mask_ok = false;
      }
    }
    pass = pass && mask_ok;
    detail += std::string("mask preservation ") + (mask_ok ? "ok; " : "VIOLATED; ");
  }

  // Task range.
  {
    Rng rng(RngSpec{804, 0});
    bool range_ok = true;
    for (int i = 0; i < 100000; ++i) {
      const TaskSample s = make_sample(rng.uniform(), rng.uniform());
      if (s.x < 0.0 || s.x > 1.0 || s.y < 0.0 || s.y > 1.0) range_ok = false;
    }
    pass = pass && range_ok;
    detail += std::string("task range ") + (range_ok ? "ok; " : "VIOLATED; ");
  }

  // Online/batched equivalence.
  {
    auto topo = build_topology({2, 3, 2}, true);
    Rng rng(RngSpec{805, 0});
    NetworkParams p = init_weights(topo, rng, 0.8);
    const Activation act(ActivationKind::kRelu, DerivativeMode::kSurrogate, {});
    const LearningRates rates = make_learning_rates(*topo, 0.1);
    PhaseSchedule sched{300.0, 300.0, 1.0, 1.0};
    const PhaseResult fwd = forward_phase(p, Eigen::Vector2d{0.3, 0.6}, sched, act);
    const PhaseResult bwd =
        backward_phase(p, fwd.state, Eigen::Vector2d{0.7, 0.2}, sched, act);
    NetworkParams batched = p, online = p;
    apply_contrastive_update(batched, fwd.state, bwd.state, act, rates);
    const Eigen::VectorXd r_star = rho_vector(fwd.state.s, online, act);
    const Eigen::VectorXd r_beta = rho_vector(bwd.state.s, online, act);
    apply_correlation_update(online, r_star, rates, -1.0);
    apply_correlation_update(online, r_beta, rates, +1.0);
    const bool equiv = (batched.w - online.w).cwiseAbs().maxCoeff() <= 1e-12;
    pass = pass && equiv;
    detail += std::string("online/batched equivalence ") + (equiv ? "ok" : "VIOLATED");
  }

  return {pass, detail};
}

}  // namespace

int main() {
  using Entry = std::pair<std::string, std::function<Outcome()>>;
  const std::vector<Entry> criteria = {
      {"1 gradient-estimate vs brute-force oracle", criterion_gradient_estimate},
      {"2 lambda identification", criterion_lambda},
      {"3 energy descent", criterion_energy_descent},
      {"4 LIF rate correspondence", criterion_lif_rate},
      {"5 rate-model learning", criterion_rate_learning},
      {"6 spiking learning", criterion_spiking_learning},
      {"7 determinism", criterion_determinism},
      {"8 invariant suites", criterion_invariants},
  };

  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (out.pass ? "[PASS] " : "[FAIL] ") << "criterion " << name
              << " -- " << out.detail << std::endl;
    if (!out.pass) ++failures;
  }
  if (failures > 0) {
    std::cout << failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all criteria passed" << std::endl;
  return 0;
}
