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

#include "eqprop/rng.hpp"

#include <sstream>
#include <stdexcept>

namespace eqprop {

Rng::Rng(RngSpec spec) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(spec.seed & 0xffffffffu),
      static_cast<std::uint32_t>(spec.seed >> 32),
      static_cast<std::uint32_t>(spec.stream_id & 0xffffffffu),
      static_cast<std::uint32_t>(spec.stream_id >> 32),
  };
  engine_.seed(seq);
}

std::string Rng::save_state() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void Rng::restore_state(const std::string& text) {
  std::istringstream is(text);
  is >> engine_;
  if (is.fail()) {
    throw std::runtime_error("Rng::restore_state: malformed engine state");
  }
}

}  // namespace eqprop
