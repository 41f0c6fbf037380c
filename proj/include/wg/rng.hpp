// Copyright 2026 The wgcloud Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>

#include "wg/digest.hpp"

namespace wg {

/// Counter-based deterministic randomness; (seed, counter) persist in the
/// state file so scenario replay is bit-reproducible.
struct DeterministicRng {
  uint64_t seed = 0;
  uint64_t counter = 0;

  uint64_t next_u64() {
    uint64_t c = counter++;
    return mix64(seed ^ mix64(c));
  }

  std::array<uint8_t, 12> next_nonce() {
    std::array<uint8_t, 12> nonce{};
    uint64_t a = next_u64();
    uint64_t b = next_u64();
    for (int i = 0; i < 8; ++i) nonce[i] = uint8_t(a >> (8 * i));
    for (int i = 0; i < 4; ++i) nonce[8 + i] = uint8_t(b >> (8 * i));
    return nonce;
  }
};

}  // namespace wg
