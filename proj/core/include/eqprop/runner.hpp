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

#include <optional>
#include <string>

#include "eqprop/config.hpp"
#include "eqprop/metrics.hpp"

namespace eqprop {

/// Output layout inside the run directory.
struct RunPaths {
  std::string dir;
  std::string metrics_csv() const { return dir + "/metrics.csv"; }
  std::string checkpoint() const { return dir + "/checkpoint.json"; }
  std::string final_weights() const { return dir + "/weights_final.json"; }
};

struct RunResult {
  std::optional<double> initial_eval_error;  ///< absent when resuming
  double final_eval_error = 0.0;
  long samples_run = 0;
};

/// Executes the configured training run. Writes metrics.csv incrementally
/// (header, an initial-evaluation row at sample 0, then one row per
/// sample), a rolling checkpoint.json with resume state at every eval_every
/// samples, and weights_final.json at the end. The output directory must
/// already exist; that is checked before any simulation starts.
RunResult run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                         bool quiet = false);

/// Restores params, sampler state and sample index from a rolling
/// checkpoint (which embeds its config) and continues the run, appending to
/// the existing metrics.csv. The resulting log is byte-identical to an
/// uninterrupted run.
RunResult resume_experiment(const std::string& checkpoint_path,
                            const std::string& out_dir, bool quiet = false);

/// CSV row in the deterministic metrics schema
/// (sample_index,forward_residual,train_error,eval_error).
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& record);

}  // namespace eqprop
