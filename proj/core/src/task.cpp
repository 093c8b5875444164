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

#include "eqprop/task.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "eqprop/csv.hpp"

namespace eqprop {

TaskSample make_sample(double theta, double phi) {
  if (!(theta >= 0.0 && theta <= 1.0 && phi >= 0.0 && phi <= 1.0)) {
    throw std::invalid_argument("task: inputs must lie in [0,1]");
  }
  constexpr double pi = std::numbers::pi;
  TaskSample s;
  s.theta = theta;
  s.phi = phi;
  s.x = (std::cos(pi * phi) + std::cos(pi * (phi + theta)) + 2.0) / 4.0;
  s.y = (std::sin(pi * phi) + std::sin(pi * (phi + theta)) + 2.0) / 4.0;
  return s;
}

std::vector<TaskSample> sample_uniform(Rng& rng, int n) {
  if (n < 1) throw std::invalid_argument("task: need n >= 1 samples");
  std::vector<TaskSample> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double theta = rng.uniform();
    const double phi = rng.uniform();
    out.push_back(make_sample(theta, phi));
  }
  return out;
}

std::vector<TaskSample> grid(int k) {
  if (k < 2) throw std::invalid_argument("task: grid needs k >= 2");
  std::vector<TaskSample> out;
  out.reserve(static_cast<std::size_t>(k) * k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      out.push_back(make_sample(static_cast<double>(a) / (k - 1),
                                static_cast<double>(b) / (k - 1)));
    }
  }
  return out;
}

double euclid_error(const std::vector<Eigen::Vector2d>& predictions,
                    const std::vector<Eigen::Vector2d>& targets) {
  if (predictions.size() != targets.size()) {
    throw std::invalid_argument("euclid_error: length mismatch");
  }
  if (predictions.empty()) {
    throw std::invalid_argument("euclid_error: empty input");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    total += (predictions[i] - targets[i]).norm();
  }
  return total / static_cast<double>(predictions.size());
}

std::vector<Eigen::Vector2d> targets_of(const std::vector<TaskSample>& samples) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.target());
  return out;
}

void write_task_csv(const std::string& path,
                    const std::vector<TaskSample>& samples) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "theta,phi,x,y\n";
  for (const auto& s : samples) {
    out << format_double(s.theta) << ',' << format_double(s.phi) << ','
        << format_double(s.x) << ',' << format_double(s.y) << '\n';
  }
}

}  // namespace eqprop
