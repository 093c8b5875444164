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

// Command-line front end. Exit codes: 0 success, 1 usage or configuration
// error, 2 simulation divergence, 3 gradcheck threshold failure.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>

#include "eqprop/config.hpp"
#include "eqprop/csv.hpp"
#include "eqprop/gradcheck.hpp"
#include "eqprop/runner.hpp"

namespace {

using namespace eqprop;

constexpr int kOk = 0;
constexpr int kUsageError = 1;
constexpr int kDivergence = 2;
constexpr int kThresholdFailure = 3;

ExperimentConfig resolve_config(const std::string& preset_name,
                                const std::string& config_path) {
  if (preset_name.empty() == config_path.empty()) {
    throw ConfigError("give exactly one of --preset or --config");
  }
  return preset_name.empty() ? load_config_file(config_path)
                             : preset(preset_name);
}

int cmd_train(const std::string& preset_name, const std::string& config_path,
              const std::string& out_dir, const std::string& resume_path,
              std::optional<long> samples, std::optional<std::uint64_t> seed,
              bool quiet) {
  RunResult result;
  if (!resume_path.empty()) {
    result = resume_experiment(resume_path, out_dir, quiet);
  } else {
    ExperimentConfig cfg = resolve_config(preset_name, config_path);
    if (samples) cfg.n_train_samples = *samples;
    if (seed) cfg.seed = *seed;
    cfg.validate();
    result = run_experiment(cfg, out_dir, quiet);
  }
  std::cout << "final_eval_error " << format_double(result.final_eval_error)
            << "\n";
  return kOk;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& preset_name,
             const std::string& config_path, int grid_k,
             const std::string& dump_path, const std::string& trace_path,
             double trace_theta, double trace_phi) {
  ExperimentConfig cfg;
  {
    std::ifstream in(checkpoint_path);
    if (!in) throw ConfigError("cannot open checkpoint: " + checkpoint_path);
    nlohmann::json j;
    in >> j;
    if (j.contains("config")) {
      cfg = parse_config(j.at("config").get<std::string>());
    } else {
      cfg = resolve_config(preset_name, config_path);
    }
  }
  auto topology = build_topology(cfg.layer_sizes, cfg.bias);
  const NetworkParams params = load_checkpoint(checkpoint_path, topology);
  const std::vector<TaskSample> eval_set = grid(grid_k > 0 ? grid_k : cfg.eval_grid);

  std::vector<Eigen::Vector2d> preds;
  if (cfg.model == ModelKind::kRate) {
    preds = predict(params, eval_set, cfg.schedule, cfg.make_activation(),
                    cfg.make_phase_options());
  } else {
    const RateCalibration calibration(cfg.neuron);
    preds = predict_spiking(params, eval_set, cfg.schedule, cfg.neuron,
                            cfg.make_population_code(), calibration,
                            SpikingTrialOptions{cfg.reset_traces, 1.0});
  }
  if (!trace_path.empty()) {
    if (cfg.model != ModelKind::kRate) {
      throw ConfigError("--energy-trace: requires a rate-model checkpoint");
    }
    RatePhaseOptions popts = cfg.make_phase_options();
    popts.record_energy = true;
    const TaskSample sample = make_sample(trace_theta, trace_phi);
    const PhaseResult fwd = forward_phase(params, sample.input(), cfg.schedule,
                                          cfg.make_activation(), popts);
    write_energy_trace_csv(fwd.report, trace_path);
  }

  const double err = euclid_error(preds, targets_of(eval_set));
  if (!dump_path.empty()) {
    std::ofstream out(dump_path);
    if (!out) throw ConfigError("cannot open for writing: " + dump_path);
    out << "theta,phi,x,y,pred_x,pred_y\n";
    for (std::size_t i = 0; i < eval_set.size(); ++i) {
      const auto& s = eval_set[i];
      out << format_double(s.theta) << ',' << format_double(s.phi) << ','
          << format_double(s.x) << ',' << format_double(s.y) << ','
          << format_double(preds[i](0)) << ',' << format_double(preds[i](1))
          << '\n';
    }
  }
  std::cout << "eval_error " << format_double(err) << "\n";
  return kOk;
}

int cmd_gradcheck(int instances, std::uint64_t seed,
                  const std::string& out_path) {
  const GradcheckReport report = run_gradcheck(instances, seed);
  const nlohmann::json j = to_json(report);
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot open for writing: " + out_path);
    out << j.dump(2) << "\n";
    std::cout << (report.pass ? "gradcheck PASS" : "gradcheck FAIL") << "\n";
  }
  return report.pass ? kOk : kThresholdFailure;
}

int cmd_fi_curve(const std::string& out_path, double v_min, double v_max,
                 int points, double dt, double duration) {
  NeuronConstants k;
  std::ofstream out(out_path);
  if (!out) throw ConfigError("cannot open for writing: " + out_path);
  out << "v,liffi_rate,simulated_rate\n";
  for (int i = 0; i < points; ++i) {
    const double v = v_min + (v_max - v_min) * i / (points - 1);
    out << format_double(v) << ',' << format_double(liffi(v, k)) << ','
        << format_double(lif_rate_empirical(v, k, dt, duration)) << '\n';
  }
  return kOk;
}

int cmd_task_dump(const std::string& out_path, int grid_k, long n,
                  std::uint64_t seed) {
  std::vector<TaskSample> samples;
  if (n > 0) {
    Rng rng(RngSpec{seed, 0});
    samples = sample_uniform(rng, static_cast<int>(n));
  } else {
    samples = grid(grid_k);
  }
  write_task_csv(out_path, samples);
  return kOk;
}

int cmd_probe(const std::string& preset_name, const std::string& config_path,
              int neuron, double theta, double phi, const std::string& out_path,
              const std::string& raster_path) {
  ExperimentConfig cfg = resolve_config(preset_name, config_path);
  if (cfg.model != ModelKind::kSpiking) {
    throw ConfigError("probe: requires a spiking-model config");
  }
  cfg.validate();
  auto topology = build_topology(cfg.layer_sizes, cfg.bias);
  Rng weight_rng(RngSpec{cfg.seed, 0});
  NetworkParams params = init_weights(topology, weight_rng, cfg.init_scale);
  if (neuron < 0 || neuron >= topology->size()) {
    throw ConfigError("probe: neuron index out of range");
  }

  const RateCalibration calibration(cfg.neuron);
  const LearningRates rates = make_learning_rates(*topology, cfg.eta_base);
  SpikingState state = make_spiking_state(*topology, cfg.neuron);
  StepRecorder recorder;
  recorder.probe_neuron = neuron;
  recorder.record_spikes = !raster_path.empty();

  const TaskSample sample = make_sample(theta, phi);
  run_trial(params, state, sample, cfg.schedule, cfg.neuron, rates,
            cfg.make_population_code(), calibration,
            SpikingTrialOptions{true, 1.0}, &recorder);

  std::ofstream out(out_path);
  if (!out) throw ConfigError("cannot open for writing: " + out_path);
  out << "t,u,syn,rate_est,current\n";
  for (const auto& row : recorder.probe) {
    out << format_double(row.t) << ',' << format_double(row.u) << ','
        << format_double(row.syn) << ',' << format_double(row.rate_est) << ','
        << format_double(row.current) << '\n';
  }
  if (!raster_path.empty()) {
    std::ofstream raster(raster_path);
    if (!raster) throw ConfigError("cannot open for writing: " + raster_path);
    raster << "neuron_id,spike_time_ms\n";
    for (const auto& [id, t] : recorder.spikes) {
      raster << id << ',' << format_double(t) << '\n';
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium propagation for rate and spiking networks"};
  app.require_subcommand(1);

  std::string preset_name, config_path, out_dir, resume_path;
  std::optional<long> samples;
  std::optional<std::uint64_t> seed;
  bool quiet = false;

  auto* train = app.add_subcommand("train", "Run a training experiment");
  train->add_option("--preset", preset_name,
                    "Preset name (fig3-relu, fig3-liffi, fig3-nohidden, "
                    "fig5-spiking, fig5-reduced, fig5-reduced-nohidden)");
  train->add_option("--config", config_path, "Config file path");
  train->add_option("--out", out_dir, "Existing output directory")->required();
  train->add_option("--resume", resume_path, "Resume from checkpoint.json");
  train->add_option("--samples", samples, "Override n_train_samples");
  train->add_option("--seed", seed, "Override seed");
  train->add_flag("--quiet", quiet, "Suppress progress output");

  std::string checkpoint_path, dump_path, trace_path;
  int grid_k = 0;
  double trace_theta = 0.5, trace_phi = 0.5;
  auto* eval = app.add_subcommand("eval", "Evaluate a weight checkpoint on a grid");
  eval->add_option("--checkpoint", checkpoint_path, "Checkpoint JSON")->required();
  eval->add_option("--preset", preset_name, "Preset (when the checkpoint has no config)");
  eval->add_option("--config", config_path, "Config file (ditto)");
  eval->add_option("--grid", grid_k, "Evaluation grid size k (k x k)");
  eval->add_option("--dump", dump_path, "Write per-point predictions CSV");
  eval->add_option("--energy-trace", trace_path,
                   "Write step,energy,residual CSV of one forward relaxation");
  eval->add_option("--theta", trace_theta, "Input theta for --energy-trace");
  eval->add_option("--phi", trace_phi, "Input phi for --energy-trace");

  int gc_instances = 20;
  std::uint64_t gc_seed = 7;
  std::string gc_out;
  auto* gradcheck = app.add_subcommand(
      "gradcheck", "Validate the contrastive gradient estimate against brute force");
  gradcheck->add_option("--instances", gc_instances, "Number of random instances");
  gradcheck->add_option("--seed", gc_seed, "Instance seed");
  gradcheck->add_option("--out", gc_out, "Write the JSON report here instead of stdout");

  std::string fi_out;
  double v_min = 20.5, v_max = 80.0, fi_dt = 0.01, fi_duration = 20000.0;
  int fi_points = 40;
  auto* fi = app.add_subcommand("fi-curve",
                                "Dump analytic vs simulated LIF f-I curve");
  fi->add_option("--out", fi_out, "Output CSV")->required();
  fi->add_option("--vmin", v_min, "Lowest drive");
  fi->add_option("--vmax", v_max, "Highest drive");
  fi->add_option("--points", fi_points, "Grid points")->check(CLI::Range(2, 100000));
  fi->add_option("--dt", fi_dt, "Euler step (ms)");
  fi->add_option("--duration", fi_duration, "Simulated time per point (ms)");

  std::string task_out;
  int task_grid = 16;
  long task_n = 0;
  std::uint64_t task_seed = 1;
  auto* task = app.add_subcommand("task-dump", "Export the regression dataset");
  task->add_option("--out", task_out, "Output CSV")->required();
  task->add_option("--grid", task_grid, "Grid size (used when --n is 0)");
  task->add_option("--n", task_n, "Number of uniform samples (0 = grid)");
  task->add_option("--seed", task_seed, "Sampling seed");

  int probe_neuron = 0;
  double probe_theta = 0.5, probe_phi = 0.5;
  std::string probe_out, raster_out;
  auto* probe = app.add_subcommand(
      "probe", "Trace u/syn/rate_est/current of one neuron over a spiking trial");
  probe->add_option("--preset", preset_name, "Preset name");
  probe->add_option("--config", config_path, "Config file path");
  probe->add_option("--neuron", probe_neuron, "Neuron index")->required();
  probe->add_option("--theta", probe_theta, "Sample theta in [0,1]");
  probe->add_option("--phi", probe_phi, "Sample phi in [0,1]");
  probe->add_option("--out", probe_out, "Probe CSV")->required();
  probe->add_option("--raster", raster_out, "Also dump the spike raster CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (train->parsed()) {
      return cmd_train(preset_name, config_path, out_dir, resume_path, samples,
                       seed, quiet);
    }
    if (eval->parsed()) {
      return cmd_eval(checkpoint_path, preset_name, config_path, grid_k,
                      dump_path, trace_path, trace_theta, trace_phi);
    }
    if (gradcheck->parsed()) return cmd_gradcheck(gc_instances, gc_seed, gc_out);
    if (fi->parsed()) {
      return cmd_fi_curve(fi_out, v_min, v_max, fi_points, fi_dt, fi_duration);
    }
    if (task->parsed()) {
      return cmd_task_dump(task_out, task_grid, task_n, task_seed);
    }
    if (probe->parsed()) {
      return cmd_probe(preset_name, config_path, probe_neuron, probe_theta,
                       probe_phi, probe_out, raster_out);
    }
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}
