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
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wg {

using Digest = std::array<uint8_t, 32>;

/// Incremental SHA-256 (FIPS 180-4).
class Sha256 {
 public:
  Sha256();
  void update(const void* data, size_t len);
  void update(std::string_view text) { update(text.data(), text.size()); }
  void update(std::span<const uint8_t> bytes) { update(bytes.data(), bytes.size()); }
  Digest finish();

 private:
  void compress(const uint8_t block[64]);

  std::array<uint32_t, 8> state_;
  uint64_t total_len_ = 0;
  std::array<uint8_t, 64> buffer_{};
  size_t buffered_ = 0;
};

Digest sha256(std::span<const uint8_t> bytes);
Digest sha256(std::string_view text);

std::string hex_encode(std::span<const uint8_t> bytes);
std::string hex_encode(const Digest& digest);
/// Lowercase hex only; returns false on odd length or non-hex characters.
bool hex_decode(std::string_view text, std::vector<uint8_t>& out);

/// 64-bit FNV-1a over the bytes of `text`.
uint64_t fnv1a64(std::string_view text);

/// splitmix64 finalizer; used to spread fnv output before rank comparisons.
uint64_t mix64(uint64_t x);

}  // namespace wg
