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

#include <cstdint>
#include <map>
#include <vector>

namespace wg::rs {

using Block = std::vector<uint8_t>;

/// GF(2^8) arithmetic with primitive polynomial x^8 + x^4 + x^3 + x^2 + 1.
uint8_t gf_mul(uint8_t a, uint8_t b);
uint8_t gf_inv(uint8_t a);

/// Row `index` (0..k+m-1) of the systematic generator matrix: the top k rows
/// are the identity, the bottom m rows come from a Vandermonde matrix
/// normalized so that encode is systematic.
std::vector<uint8_t> generator_row(unsigned k, unsigned m, unsigned index);

/// Systematic encode: k equal-length data blocks in, m parity blocks out.
std::vector<Block> encode(unsigned k, unsigned m, const std::vector<Block>& data);

/// Rebuild the original k data blocks from any k of the k+m indexed shards.
/// Shard indices 0..k-1 are data, k..k+m-1 parity.
std::vector<Block> decode(unsigned k, unsigned m, const std::map<unsigned, Block>& shards);

/// Compute a single shard (data or parity) from the full data set.
Block encode_shard(unsigned k, unsigned m, unsigned index, const std::vector<Block>& data);

}  // namespace wg::rs
