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
#include <random>
#include <string>

namespace eqprop {

/// Seed plus stream id. Identical (seed, stream_id) pairs yield bit-identical
/// draw sequences; distinct stream ids give independent streams off one seed.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// Deterministic random source. The uniform mapping is done from raw engine
/// output (53-bit mantissa) rather than std::uniform_real_distribution, whose
/// output is implementation-defined.
class Rng {
 public:
  Rng() : Rng(RngSpec{}) {}
  explicit Rng(RngSpec spec);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Engine state as text; restore_state(save_state()) resumes the exact
  /// draw sequence. Used by training checkpoints.
  std::string save_state() const;
  void restore_state(const std::string& text);

 private:
  std::mt19937_64 engine_;
};

}  // namespace eqprop
