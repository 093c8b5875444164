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
#include <string>
#include <vector>

#include "eqprop/rng.hpp"

namespace eqprop {

/// One point of the two-joint-arm regression task. Inputs (theta, phi) in
/// [0,1]^2; targets
///   x = (cos(pi*phi) + cos(pi*(phi + theta)) + 2) / 4
///   y = (sin(pi*phi) + sin(pi*(phi + theta)) + 2) / 4
/// which both land in [0,1].
struct TaskSample {
  double theta = 0.0;
  double phi = 0.0;
  double x = 0.0;
  double y = 0.0;

  Eigen::Vector2d input() const { return {theta, phi}; }
  Eigen::Vector2d target() const { return {x, y}; }
};

TaskSample make_sample(double theta, double phi);

/// n i.i.d. uniform samples over [0,1]^2.
std::vector<TaskSample> sample_uniform(Rng& rng, int n);

/// k x k evaluation grid including all four corners (k >= 2).
std::vector<TaskSample> grid(int k);

/// Mean Euclidean distance between paired predictions and targets.
double euclid_error(const std::vector<Eigen::Vector2d>& predictions,
                    const std::vector<Eigen::Vector2d>& targets);

std::vector<Eigen::Vector2d> targets_of(const std::vector<TaskSample>& samples);

/// CSV export, columns theta,phi,x,y.
void write_task_csv(const std::string& path,
                    const std::vector<TaskSample>& samples);

}  // namespace eqprop
