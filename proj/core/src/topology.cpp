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

#include "eqprop/topology.hpp"

#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace eqprop {

NetworkTopology NetworkTopology::layered(const std::vector<int>& layer_sizes,
                                         const TopologyOptions& opts) {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("topology: need at least 2 layers");
  }
  for (int s : layer_sizes) {
    if (s < 1) throw std::invalid_argument("topology: zero-size layer");
  }

  NetworkTopology t;
  t.layer_sizes_ = layer_sizes;
  const int n_layers = static_cast<int>(layer_sizes.size());
  const int n_units = std::accumulate(layer_sizes.begin(), layer_sizes.end(), 0);
  t.n_ = n_units + (opts.bias_unit ? 1 : 0);
  t.input_count_ = layer_sizes.front();
  t.output_count_ = layer_sizes.back();
  t.output_begin_ = n_units - t.output_count_;
  t.bias_index_ = opts.bias_unit ? n_units : -1;

  std::vector<int> offset(n_layers + 1, 0);
  for (int l = 0; l < n_layers; ++l) offset[l + 1] = offset[l] + layer_sizes[l];

  t.mask_ = Eigen::MatrixXd::Zero(t.n_, t.n_);
  for (int l = 0; l + 1 < n_layers; ++l) {
    const bool backward = (l > 0) || opts.input_feedback;
    for (int post = offset[l + 1]; post < offset[l + 2]; ++post) {
      for (int pre = offset[l]; pre < offset[l + 1]; ++pre) {
        t.mask_(post, pre) = 1.0;
        if (backward) t.mask_(pre, post) = 1.0;
      }
    }
  }
  if (opts.bias_unit) {
    for (int i = offset[1]; i < offset[n_layers]; ++i) {
      t.mask_(i, t.bias_index_) = 1.0;
    }
  }
  t.mask_.diagonal().setZero();

  t.indegree_ = Eigen::VectorXi::Zero(t.n_);
  for (int i = 0; i < t.n_; ++i) {
    int deg = 0;
    for (int j = 0; j < t.n_; ++j) deg += t.mask_(i, j) != 0.0 ? 1 : 0;
    t.indegree_(i) = deg;
  }
  for (int i = 0; i < t.n_; ++i) {
    const bool needs_drive = !t.is_input(i) && !t.is_bias(i);
    if (needs_drive && t.indegree_(i) < 1) {
      throw std::logic_error("topology: non-input neuron with indegree 0");
    }
  }
  return t;
}

std::string NetworkTopology::mask_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a offset basis
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      h ^= mask_(i, j) != 0.0 ? '1' : '0';
      h *= 0x100000001b3ull;
    }
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k) {
    out[k] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::shared_ptr<const NetworkTopology> build_topology(
    const std::vector<int>& layer_sizes, bool bias) {
  TopologyOptions opts;
  opts.bias_unit = bias;
  return build_topology(layer_sizes, opts);
}

std::shared_ptr<const NetworkTopology> build_topology(
    const std::vector<int>& layer_sizes, const TopologyOptions& opts) {
  return std::make_shared<const NetworkTopology>(
      NetworkTopology::layered(layer_sizes, opts));
}

}  // namespace eqprop
