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
#include <span>
#include <vector>

namespace wg {

inline constexpr size_t kAeadKeyLen = 32;
inline constexpr size_t kAeadNonceLen = 12;
inline constexpr size_t kAeadTagLen = 16;

using AeadKey = std::array<uint8_t, kAeadKeyLen>;
using AeadNonce = std::array<uint8_t, kAeadNonceLen>;

/// ChaCha20 keystream XOR (RFC 8439 section 2.4), starting at `counter`.
void chacha20_xor(const AeadKey& key, uint32_t counter, const AeadNonce& nonce,
                  std::span<const uint8_t> in, std::span<uint8_t> out);

/// One-shot Poly1305 MAC (RFC 8439 section 2.5).
std::array<uint8_t, 16> poly1305(const std::array<uint8_t, 32>& key,
                                 std::span<const uint8_t> message);

/// ChaCha20-Poly1305 seal: returns ciphertext || 16-byte tag.
std::vector<uint8_t> aead_seal(const AeadKey& key, const AeadNonce& nonce,
                               std::span<const uint8_t> plaintext,
                               std::span<const uint8_t> aad = {});

/// Verifies the tag and decrypts; throws Errc::AuthFailure on mismatch.
std::vector<uint8_t> aead_open(const AeadKey& key, const AeadNonce& nonce,
                               std::span<const uint8_t> sealed,
                               std::span<const uint8_t> aad = {});

}  // namespace wg
