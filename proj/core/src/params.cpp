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

#include "eqprop/params.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace eqprop {

void NetworkParams::add_masked(const Eigen::MatrixXd& delta) {
  w += delta.cwiseProduct(topology->mask());
}

void NetworkParams::symmetrize() {
  const Eigen::MatrixXd& m = topology->mask();
  if (!m.isApprox(m.transpose())) {
    throw std::invalid_argument("symmetrize: topology mask is not symmetric");
  }
  w = ((w + w.transpose()) / 2.0).cwiseProduct(m).eval();
}

double NetworkParams::max_mask_violation() const {
  const Eigen::MatrixXd stray =
      w - w.cwiseProduct(topology->mask());
  return stray.cwiseAbs().maxCoeff();
}

NetworkParams init_weights(std::shared_ptr<const NetworkTopology> topology,
                           Rng& rng, double scale) {
  if (scale <= 0.0) throw std::invalid_argument("init_weights: scale must be > 0");
  const int n = topology->size();
  NetworkParams p{std::move(topology), Eigen::MatrixXd::Zero(n, n)};
  for (int i = 0; i < n; ++i) {
    const int deg = p.topology->indegree()(i);
    if (deg == 0) continue;
    const double half_width = scale / std::sqrt(static_cast<double>(deg));
    for (int j = 0; j < n; ++j) {
      if (p.topology->connected(i, j)) {
        p.w(i, j) = rng.uniform(-half_width, half_width);
      }
    }
  }
  return p;
}

nlohmann::json weights_to_json(const NetworkParams& params) {
  const int n = params.topology->size();
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) flat.push_back(params.w(i, j));
  }
  nlohmann::json j;
  j["layer_sizes"] = params.topology->layer_sizes();
  j["weights"] = std::move(flat);
  j["mask_hash"] = params.topology->mask_hash();
  return j;
}

NetworkParams weights_from_json(const nlohmann::json& j,
                                std::shared_ptr<const NetworkTopology> topology) {
  const auto sizes = j.at("layer_sizes").get<std::vector<int>>();
  if (sizes != topology->layer_sizes()) {
    throw std::runtime_error("checkpoint: layer_sizes mismatch");
  }
  if (j.at("mask_hash").get<std::string>() != topology->mask_hash()) {
    throw std::runtime_error("checkpoint: mask_hash mismatch");
  }
  const auto flat = j.at("weights").get<std::vector<double>>();
  const int n = topology->size();
  if (flat.size() != static_cast<std::size_t>(n) * n) {
    throw std::runtime_error("checkpoint: weight count mismatch");
  }
  NetworkParams p{std::move(topology), Eigen::MatrixXd::Zero(n, n)};
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) p.w(i, k) = flat[static_cast<std::size_t>(i) * n + k];
  }
  if (p.max_mask_violation() != 0.0) {
    throw std::runtime_error("checkpoint: weight outside connectivity mask");
  }
  return p;
}

void save_checkpoint(const NetworkParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out << weights_to_json(params).dump(2) << "\n";
}

NetworkParams load_checkpoint(const std::string& path,
                              std::shared_ptr<const NetworkTopology> topology) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  nlohmann::json j;
  in >> j;
  return weights_from_json(j, std::move(topology));
}

}  // namespace eqprop
