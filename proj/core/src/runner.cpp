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

#include "eqprop/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "eqprop/csv.hpp"
#include "eqprop/params.hpp"

namespace eqprop {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct RunContext {
  ExperimentConfig config;
  std::shared_ptr<const NetworkTopology> topology;
  NetworkParams params;
  Rng sampler;
  long start_index = 0;
  std::optional<SpikingState> carried_state;
};

nlohmann::json rolling_checkpoint(const RunContext& ctx, long sample_index) {
  nlohmann::json j = weights_to_json(ctx.params);
  j["config"] = serialize_config(ctx.config);
  nlohmann::json resume;
  resume["sample_index"] = sample_index;
  resume["sampler_state"] = ctx.sampler.save_state();
  if (ctx.config.model == ModelKind::kSpiking && !ctx.config.reset_traces &&
      ctx.carried_state) {
    const SpikingState& st = *ctx.carried_state;
    const auto vec = [](const Eigen::VectorXd& v) {
      return std::vector<double>(v.data(), v.data() + v.size());
    };
    resume["trace_u"] = vec(st.u);
    resume["trace_syn"] = vec(st.syn);
    resume["trace_rate_est"] = vec(st.rate_est);
    resume["trace_refract"] = std::vector<int>(
        st.refract_left.data(), st.refract_left.data() + st.refract_left.size());
  }
  j["resume"] = std::move(resume);
  return j;
}

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

RunResult run_common(RunContext& ctx, const RunPaths& paths, bool fresh,
                     bool quiet) {
  const ExperimentConfig& cfg = ctx.config;
  const std::vector<TaskSample> eval_set = grid(cfg.eval_grid);
  const Activation act = cfg.make_activation();
  const LearningRates rates = make_learning_rates(*ctx.topology, cfg.eta_base);

  std::ofstream csv;
  if (fresh) {
    csv.open(paths.metrics_csv());
    if (!csv) throw std::runtime_error("cannot open " + paths.metrics_csv());
    csv << metrics_csv_header();
  } else {
    if (!fs::exists(paths.metrics_csv())) {
      throw std::runtime_error("resume: missing " + paths.metrics_csv());
    }
    csv.open(paths.metrics_csv(), std::ios::app);
    if (!csv) throw std::runtime_error("cannot open " + paths.metrics_csv());
  }

  RunResult result;
  const auto t_start = Clock::now();

  const auto eval_now = [&]() {
    if (cfg.model == ModelKind::kRate) {
      return evaluate(ctx.params, eval_set, cfg.schedule, act,
                      cfg.make_phase_options());
    }
    const RateCalibration calibration(cfg.neuron);
    return evaluate_spiking(ctx.params, eval_set, cfg.schedule, cfg.neuron,
                            cfg.make_population_code(), calibration,
                            SpikingTrialOptions{cfg.reset_traces, 1.0});
  };

  if (fresh) {
    MetricsRecord initial;
    initial.sample_index = 0;
    initial.eval_error = eval_now();
    result.initial_eval_error = initial.eval_error;
    csv << metrics_csv_row(initial);
    csv.flush();
  }

  std::optional<double> last_eval;
  long last_index = ctx.start_index;
  const MetricsSink sink = [&](const MetricsRecord& rec) {
    csv << metrics_csv_row(rec);
    csv.flush();
    last_index = rec.sample_index;
    if (rec.eval_error) {
      last_eval = rec.eval_error;
      if (!quiet) {
        const double wall_ms =
            std::chrono::duration<double, std::milli>(Clock::now() - t_start)
                .count();
        std::cerr << "sample " << rec.sample_index << "  eval "
                  << format_double(*rec.eval_error) << "  wall_ms "
                  << format_double(wall_ms) << "\n";
      }
    }
    if (cfg.eval_every > 0 && rec.sample_index % cfg.eval_every == 0) {
      write_json(rolling_checkpoint(ctx, rec.sample_index), paths.checkpoint());
    }
  };

  const long remaining = cfg.n_train_samples - ctx.start_index;
  if (remaining > 0) {
    if (cfg.model == ModelKind::kRate) {
      RateTrainOptions opts;
      opts.update_mode = cfg.update_mode;
      opts.phase = cfg.make_phase_options();
      opts.eval_every = cfg.eval_every;
      opts.eval_set = eval_set;
      opts.sample_index_offset = ctx.start_index;
      train_epoch(ctx.params, ctx.sampler, cfg.schedule, rates, remaining, act,
                  opts, sink);
    } else {
      SpikingTrainOptions opts;
      opts.trial = SpikingTrialOptions{cfg.reset_traces, 1.0};
      opts.eval_every = cfg.eval_every;
      opts.eval_set = eval_set;
      opts.sample_index_offset = ctx.start_index;
      if (!cfg.reset_traces) {
        if (!ctx.carried_state) {
          ctx.carried_state = make_spiking_state(*ctx.topology, cfg.neuron);
        }
        opts.state = &*ctx.carried_state;
      }
      train_spiking(ctx.params, ctx.sampler, cfg.schedule, cfg.neuron, rates,
                    cfg.make_population_code(), remaining, opts, sink);
    }
  }

  result.samples_run = last_index - ctx.start_index;
  result.final_eval_error = last_eval ? *last_eval : eval_now();

  write_json(rolling_checkpoint(ctx, cfg.n_train_samples), paths.checkpoint());
  save_checkpoint(ctx.params, paths.final_weights());
  return result;
}

}  // namespace

std::string metrics_csv_header() {
  return "sample_index,forward_residual,train_error,eval_error\n";
}

std::string metrics_csv_row(const MetricsRecord& r) {
  std::string row = std::to_string(r.sample_index);
  row += ',';
  if (r.forward_residual) row += format_double(*r.forward_residual);
  row += ',';
  if (r.train_error) row += format_double(*r.train_error);
  row += ',';
  if (r.eval_error) row += format_double(*r.eval_error);
  row += '\n';
  return row;
}

RunResult run_experiment(const ExperimentConfig& config,
                         const std::string& out_dir, bool quiet) {
  config.validate();
  if (!fs::is_directory(out_dir)) {
    throw std::runtime_error("output directory does not exist: " + out_dir);
  }
  RunContext ctx{config,
                 build_topology(config.layer_sizes, config.bias),
                 NetworkParams{},
                 Rng(RngSpec{config.seed, 0}),
                 0,
                 std::nullopt};
  Rng weight_rng(RngSpec{config.seed, 0});
  ctx.params = init_weights(ctx.topology, weight_rng, config.init_scale);
  ctx.sampler = Rng(RngSpec{config.seed, 1});
  return run_common(ctx, RunPaths{out_dir}, /*fresh=*/true, quiet);
}

RunResult resume_experiment(const std::string& checkpoint_path,
                            const std::string& out_dir, bool quiet) {
  if (!fs::is_directory(out_dir)) {
    throw std::runtime_error("output directory does not exist: " + out_dir);
  }
  std::ifstream in(checkpoint_path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + checkpoint_path);
  nlohmann::json j;
  in >> j;
  if (!j.contains("config") || !j.contains("resume")) {
    throw std::runtime_error("checkpoint has no resume state: " + checkpoint_path);
  }

  RunContext ctx{parse_config(j.at("config").get<std::string>()),
                 nullptr,
                 NetworkParams{},
                 Rng{},
                 0,
                 std::nullopt};
  ctx.topology = build_topology(ctx.config.layer_sizes, ctx.config.bias);
  ctx.params = weights_from_json(j, ctx.topology);
  const auto& resume = j.at("resume");
  ctx.start_index = resume.at("sample_index").get<long>();
  ctx.sampler.restore_state(resume.at("sampler_state").get<std::string>());
  if (resume.contains("trace_u")) {
    SpikingState st = make_spiking_state(*ctx.topology, ctx.config.neuron);
    const auto load = [&](const char* key, Eigen::VectorXd& v) {
      const auto data = resume.at(key).get<std::vector<double>>();
      if (data.size() != static_cast<std::size_t>(v.size())) {
        throw std::runtime_error("checkpoint: trace size mismatch");
      }
      v = Eigen::Map<const Eigen::VectorXd>(data.data(), v.size());
    };
    load("trace_u", st.u);
    load("trace_syn", st.syn);
    load("trace_rate_est", st.rate_est);
    const auto refract = resume.at("trace_refract").get<std::vector<int>>();
    if (refract.size() != static_cast<std::size_t>(st.refract_left.size())) {
      throw std::runtime_error("checkpoint: trace size mismatch");
    }
    st.refract_left =
        Eigen::Map<const Eigen::VectorXi>(refract.data(), st.refract_left.size());
    ctx.carried_state = std::move(st);
  }
  return run_common(ctx, RunPaths{out_dir}, /*fresh=*/false, quiet);
}

}  // namespace eqprop
