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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqprop/activation.hpp"
#include "eqprop/rate_training.hpp"
#include "eqprop/spiking.hpp"

namespace eqprop {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelKind { kRate, kSpiking };
ModelKind parse_model_kind(const std::string& name);
std::string to_string(ModelKind kind);

/// Full experiment description. Serialized as a flat sectioned key-value
/// text format; unknown sections or keys are hard errors so a typo in a
/// physics constant cannot pass silently. Times in ms, potentials in the
/// model's dimensionless units.
struct ExperimentConfig {
  // [experiment]
  ModelKind model = ModelKind::kRate;
  std::uint64_t seed = 1;
  long n_train_samples = 3000;
  int eval_every = 500;
  int eval_grid = 16;
  UpdateMode update_mode = UpdateMode::kBatched;

  // [topology]
  std::vector<int> layer_sizes{2, 400, 2};
  bool bias = true;
  int neurons_per_dim = 0;  ///< population size per value dimension; spiking only

  // [activation]
  ActivationKind activation = ActivationKind::kRelu;
  DerivativeMode derivative = DerivativeMode::kSurrogate;

  // [neuron]
  NeuronConstants neuron;

  // [schedule]
  PhaseSchedule schedule;

  // [learning]
  double eta_base = 0.1;
  double init_scale = 0.1;
  double s_init = 0.1;
  double bias_activation = 1.0;
  bool reset_traces = true;  ///< spiking: start each trial from rest

  void validate() const;

  Activation make_activation() const {
    return Activation(activation, derivative, neuron);
  }
  PopulationCode make_population_code() const;
  RatePhaseOptions make_phase_options() const {
    return RatePhaseOptions{s_init, bias_activation, 0.0};
  }
};

/// Known presets: "fig3-relu", "fig3-liffi", "fig3-nohidden",
/// "fig5-spiking", plus the scaled-down pair "fig5-reduced" and
/// "fig5-reduced-nohidden" used by the acceptance suite.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace eqprop
