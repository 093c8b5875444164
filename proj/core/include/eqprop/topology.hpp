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
#include <string>
#include <vector>

namespace eqprop {

struct TopologyOptions {
  /// Append one bias unit wired into every hidden and output neuron.
  bool bias_unit = true;
  /// Make the input<->first-hidden block bidirectional instead of
  /// feedforward-only. Needed wherever a fully symmetric coupling matrix is
  /// required (gradient checking); training topologies keep this off so the
  /// input layer receives no feedback.
  bool input_feedback = false;
};

/// Layered network topology with recurrent (bidirectional) connections
/// between consecutive non-input layers, feedforward input connections, and
/// an optional bias unit. Neuron order: layer 0 (inputs), layers 1..L-1,
/// then the bias unit last. Immutable after construction.
///
/// mask(i, j) == 1 means the weight w_ij (drive from j into i) may be
/// non-zero. There are no self-connections and, without input_feedback,
/// nothing projects back into the input layer. Nothing ever projects into
/// the bias unit.
class NetworkTopology {
 public:
  static NetworkTopology layered(const std::vector<int>& layer_sizes,
                                 const TopologyOptions& opts);

  int size() const { return n_; }
  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  const Eigen::MatrixXd& mask() const { return mask_; }
  const Eigen::VectorXi& indegree() const { return indegree_; }

  bool connected(int post, int pre) const { return mask_(post, pre) != 0.0; }

  int input_count() const { return input_count_; }
  int output_begin() const { return output_begin_; }
  int output_count() const { return output_count_; }
  bool has_bias() const { return bias_index_ >= 0; }
  int bias_index() const { return bias_index_; }

  bool is_input(int i) const { return i < input_count_; }
  bool is_output(int i) const {
    return i >= output_begin_ && i < output_begin_ + output_count_;
  }
  bool is_bias(int i) const { return i == bias_index_; }

  /// FNV-1a hash of the connectivity mask, as a 16-digit hex string.
  /// Checkpoints store it so weights cannot be loaded onto the wrong wiring.
  std::string mask_hash() const;

 private:
  NetworkTopology() = default;

  std::vector<int> layer_sizes_;
  int n_ = 0;
  int input_count_ = 0;
  int output_begin_ = 0;
  int output_count_ = 0;
  int bias_index_ = -1;
  Eigen::MatrixXd mask_;
  Eigen::VectorXi indegree_;
};

/// Standard constructor used by the experiment harness: feedforward inputs,
/// bidirectional hidden<->output wiring, optional bias unit.
std::shared_ptr<const NetworkTopology> build_topology(
    const std::vector<int>& layer_sizes, bool bias);

std::shared_ptr<const NetworkTopology> build_topology(
    const std::vector<int>& layer_sizes, const TopologyOptions& opts);

}  // namespace eqprop
