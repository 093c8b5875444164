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
#include <memory>
#include <nlohmann/json_fwd.hpp>
#include <string>

#include "eqprop/rng.hpp"
#include "eqprop/topology.hpp"

namespace eqprop {

/// Synaptic strengths w(i, j) = weight of the connection from neuron j into
/// neuron i. Entries outside the topology mask are exactly zero, and every
/// mutation below keeps them that way. Biases live in the columns of the
/// bias unit.
struct NetworkParams {
  std::shared_ptr<const NetworkTopology> topology;
  Eigen::MatrixXd w;

  /// w += delta restricted to masked entries.
  void add_masked(const Eigen::MatrixXd& delta);

  /// w <- (w + w^T)/2. Requires a symmetric mask, throws otherwise.
  void symmetrize();

  /// Largest |w_ij| sitting outside the mask (0 for a healthy matrix).
  double max_mask_violation() const;
};

/// Per-neuron uniform initialization in [-scale/sqrt(indegree_i),
/// +scale/sqrt(indegree_i)], masked entries only, drawn row-major.
NetworkParams init_weights(std::shared_ptr<const NetworkTopology> topology,
                           Rng& rng, double scale);

/// Checkpoint schema: {"layer_sizes": [...], "weights": row-major dense
/// array, "mask_hash": hex string}. The runner appends "config" and "resume"
/// objects on top of this for mid-training checkpoints.
nlohmann::json weights_to_json(const NetworkParams& params);

/// Rebuilds weights onto `topology`, verifying layer sizes, the mask hash
/// and that no weight sits outside the mask.
NetworkParams weights_from_json(const nlohmann::json& j,
                                std::shared_ptr<const NetworkTopology> topology);

void save_checkpoint(const NetworkParams& params, const std::string& path);
NetworkParams load_checkpoint(const std::string& path,
                              std::shared_ptr<const NetworkTopology> topology);

}  // namespace eqprop
