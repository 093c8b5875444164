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

#include <functional>
#include <optional>

namespace eqprop {

/// One row of the training log. wall_ms is runtime bookkeeping only and is
/// deliberately kept out of the metrics CSV so reruns stay byte-identical.
struct MetricsRecord {
  long sample_index = 0;
  std::optional<double> forward_residual;
  std::optional<double> train_error;
  std::optional<double> eval_error;
  double wall_ms = 0.0;
};

using MetricsSink = std::function<void(const MetricsRecord&)>;

}  // namespace eqprop
