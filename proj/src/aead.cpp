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

#include "wg/aead.hpp"

#include <cstring>

#include "wg/errors.hpp"

namespace wg {

namespace {

inline uint32_t rotl(uint32_t x, unsigned n) { return (x << n) | (x >> (32 - n)); }

inline uint32_t load32_le(const uint8_t* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}

inline void store32_le(uint8_t* p, uint32_t v) {
  p[0] = uint8_t(v);
  p[1] = uint8_t(v >> 8);
  p[2] = uint8_t(v >> 16);
  p[3] = uint8_t(v >> 24);
}

void quarter_round(uint32_t& a, uint32_t& b, uint32_t& c, uint32_t& d) {
  a += b; d ^= a; d = rotl(d, 16);
  c += d; b ^= c; b = rotl(b, 12);
  a += b; d ^= a; d = rotl(d, 8);
  c += d; b ^= c; b = rotl(b, 7);
}

void chacha20_block(const AeadKey& key, uint32_t counter, const AeadNonce& nonce,
                    uint8_t out[64]) {
  uint32_t s[16];
  s[0] = 0x61707865;
  s[1] = 0x3320646e;
  s[2] = 0x79622d32;
  s[3] = 0x6b206574;
  for (int i = 0; i < 8; ++i) s[4 + i] = load32_le(key.data() + 4 * i);
  s[12] = counter;
  for (int i = 0; i < 3; ++i) s[13 + i] = load32_le(nonce.data() + 4 * i);
  uint32_t w[16];
  std::memcpy(w, s, sizeof(w));
  for (int round = 0; round < 10; ++round) {
    quarter_round(w[0], w[4], w[8], w[12]);
    quarter_round(w[1], w[5], w[9], w[13]);
    quarter_round(w[2], w[6], w[10], w[14]);
    quarter_round(w[3], w[7], w[11], w[15]);
    quarter_round(w[0], w[5], w[10], w[15]);
    quarter_round(w[1], w[6], w[11], w[12]);
    quarter_round(w[2], w[7], w[8], w[13]);
    quarter_round(w[3], w[4], w[9], w[14]);
  }
  for (int i = 0; i < 16; ++i) store32_le(out + 4 * i, w[i] + s[i]);
}

// Poly1305 with 26-bit limbs, following the donna reference layout.
struct Poly1305State {
  uint32_t r[5];
  uint32_t h[5] = {0, 0, 0, 0, 0};
  uint32_t pad[4];

  explicit Poly1305State(const std::array<uint8_t, 32>& key) {
    uint32_t t0 = load32_le(key.data() + 0);
    uint32_t t1 = load32_le(key.data() + 4);
    uint32_t t2 = load32_le(key.data() + 8);
    uint32_t t3 = load32_le(key.data() + 12);
    r[0] = t0 & 0x3ffffff;
    r[1] = ((t0 >> 26) | (t1 << 6)) & 0x3ffff03;
    r[2] = ((t1 >> 20) | (t2 << 12)) & 0x3ffc0ff;
    r[3] = ((t2 >> 14) | (t3 << 18)) & 0x3f03fff;
    r[4] = (t3 >> 8) & 0x00fffff;
    for (int i = 0; i < 4; ++i) pad[i] = load32_le(key.data() + 16 + 4 * i);
  }

  void block(const uint8_t m[16], uint32_t hibit) {
    uint64_t d0, d1, d2, d3, d4;
    uint32_t t0 = load32_le(m + 0);
    uint32_t t1 = load32_le(m + 4);
    uint32_t t2 = load32_le(m + 8);
    uint32_t t3 = load32_le(m + 12);
    uint32_t h0 = h[0] + (t0 & 0x3ffffff);
    uint32_t h1 = h[1] + (((t0 >> 26) | (t1 << 6)) & 0x3ffffff);
    uint32_t h2 = h[2] + (((t1 >> 20) | (t2 << 12)) & 0x3ffffff);
    uint32_t h3 = h[3] + (((t2 >> 14) | (t3 << 18)) & 0x3ffffff);
    uint32_t h4 = h[4] + ((t3 >> 8) | hibit);
    uint32_t s1 = r[1] * 5, s2 = r[2] * 5, s3 = r[3] * 5, s4 = r[4] * 5;
    d0 = (uint64_t)h0 * r[0] + (uint64_t)h1 * s4 + (uint64_t)h2 * s3 + (uint64_t)h3 * s2 +
         (uint64_t)h4 * s1;
    d1 = (uint64_t)h0 * r[1] + (uint64_t)h1 * r[0] + (uint64_t)h2 * s4 + (uint64_t)h3 * s3 +
         (uint64_t)h4 * s2;
    d2 = (uint64_t)h0 * r[2] + (uint64_t)h1 * r[1] + (uint64_t)h2 * r[0] + (uint64_t)h3 * s4 +
         (uint64_t)h4 * s3;
    d3 = (uint64_t)h0 * r[3] + (uint64_t)h1 * r[2] + (uint64_t)h2 * r[1] + (uint64_t)h3 * r[0] +
         (uint64_t)h4 * s4;
    d4 = (uint64_t)h0 * r[4] + (uint64_t)h1 * r[3] + (uint64_t)h2 * r[2] + (uint64_t)h3 * r[1] +
         (uint64_t)h4 * r[0];
    uint32_t c;
    c = uint32_t(d0 >> 26); h0 = uint32_t(d0) & 0x3ffffff;
    d1 += c; c = uint32_t(d1 >> 26); h1 = uint32_t(d1) & 0x3ffffff;
    d2 += c; c = uint32_t(d2 >> 26); h2 = uint32_t(d2) & 0x3ffffff;
    d3 += c; c = uint32_t(d3 >> 26); h3 = uint32_t(d3) & 0x3ffffff;
    d4 += c; c = uint32_t(d4 >> 26); h4 = uint32_t(d4) & 0x3ffffff;
    h0 += c * 5; c = h0 >> 26; h0 &= 0x3ffffff;
    h1 += c;
    h[0] = h0; h[1] = h1; h[2] = h2; h[3] = h3; h[4] = h4;
  }

  // One-shot message tail: partial block carries the 0x01 marker.
  void update(std::span<const uint8_t> m) {
    while (m.size() >= 16) {
      block(m.data(), 1u << 24);
      m = m.subspan(16);
    }
    if (!m.empty()) {
      uint8_t last[16] = {0};
      std::memcpy(last, m.data(), m.size());
      last[m.size()] = 1;
      block(last, 0);
    }
  }

  // AEAD segment: the tail is zero-padded to a full 16-byte block.
  void update_padded(std::span<const uint8_t> m) {
    while (m.size() >= 16) {
      block(m.data(), 1u << 24);
      m = m.subspan(16);
    }
    if (!m.empty()) {
      uint8_t last[16] = {0};
      std::memcpy(last, m.data(), m.size());
      block(last, 1u << 24);
    }
  }

  std::array<uint8_t, 16> finish() {
    uint32_t h0 = h[0], h1 = h[1], h2 = h[2], h3 = h[3], h4 = h[4];
    uint32_t c;
    c = h1 >> 26; h1 &= 0x3ffffff;
    h2 += c; c = h2 >> 26; h2 &= 0x3ffffff;
    h3 += c; c = h3 >> 26; h3 &= 0x3ffffff;
    h4 += c; c = h4 >> 26; h4 &= 0x3ffffff;
    h0 += c * 5; c = h0 >> 26; h0 &= 0x3ffffff;
    h1 += c;
    uint32_t g0 = h0 + 5; c = g0 >> 26; g0 &= 0x3ffffff;
    uint32_t g1 = h1 + c; c = g1 >> 26; g1 &= 0x3ffffff;
    uint32_t g2 = h2 + c; c = g2 >> 26; g2 &= 0x3ffffff;
    uint32_t g3 = h3 + c; c = g3 >> 26; g3 &= 0x3ffffff;
    uint32_t g4 = h4 + c - (1u << 26);
    uint32_t mask = (g4 >> 31) - 1;
    h0 = (h0 & ~mask) | (g0 & mask);
    h1 = (h1 & ~mask) | (g1 & mask);
    h2 = (h2 & ~mask) | (g2 & mask);
    h3 = (h3 & ~mask) | (g3 & mask);
    h4 = (h4 & ~mask) | (g4 & mask);
    h0 = (h0 | (h1 << 26)) & 0xffffffff;
    h1 = ((h1 >> 6) | (h2 << 20)) & 0xffffffff;
    h2 = ((h2 >> 12) | (h3 << 14)) & 0xffffffff;
    h3 = ((h3 >> 18) | (h4 << 8)) & 0xffffffff;
    uint64_t f;
    f = (uint64_t)h0 + pad[0]; h0 = uint32_t(f);
    f = (uint64_t)h1 + pad[1] + (f >> 32); h1 = uint32_t(f);
    f = (uint64_t)h2 + pad[2] + (f >> 32); h2 = uint32_t(f);
    f = (uint64_t)h3 + pad[3] + (f >> 32); h3 = uint32_t(f);
    std::array<uint8_t, 16> tag;
    store32_le(tag.data() + 0, h0);
    store32_le(tag.data() + 4, h1);
    store32_le(tag.data() + 8, h2);
    store32_le(tag.data() + 12, h3);
    return tag;
  }
};

std::array<uint8_t, 16> aead_tag(const AeadKey& key, const AeadNonce& nonce,
                                 std::span<const uint8_t> ciphertext,
                                 std::span<const uint8_t> aad) {
  uint8_t block0[64];
  chacha20_block(key, 0, nonce, block0);
  std::array<uint8_t, 32> poly_key;
  std::memcpy(poly_key.data(), block0, 32);
  Poly1305State mac(poly_key);

  mac.update_padded(aad);
  mac.update_padded(ciphertext);
  uint8_t lens[16];
  uint64_t alen = aad.size(), clen = ciphertext.size();
  for (int i = 0; i < 8; ++i) lens[i] = uint8_t(alen >> (8 * i));
  for (int i = 0; i < 8; ++i) lens[8 + i] = uint8_t(clen >> (8 * i));
  mac.block(lens, 1u << 24);
  return mac.finish();
}

}  // namespace

void chacha20_xor(const AeadKey& key, uint32_t counter, const AeadNonce& nonce,
                  std::span<const uint8_t> in, std::span<uint8_t> out) {
  if (out.size() < in.size()) fail(Errc::LengthMismatch, "chacha20 output buffer too small");
  uint8_t keystream[64];
  size_t off = 0;
  while (off < in.size()) {
    chacha20_block(key, counter++, nonce, keystream);
    size_t n = std::min(in.size() - off, size_t{64});
    for (size_t i = 0; i < n; ++i) out[off + i] = in[off + i] ^ keystream[i];
    off += n;
  }
}

std::array<uint8_t, 16> poly1305(const std::array<uint8_t, 32>& key,
                                 std::span<const uint8_t> message) {
  Poly1305State mac(key);
  mac.update(message);
  return mac.finish();
}

std::vector<uint8_t> aead_seal(const AeadKey& key, const AeadNonce& nonce,
                               std::span<const uint8_t> plaintext,
                               std::span<const uint8_t> aad) {
  std::vector<uint8_t> out(plaintext.size() + kAeadTagLen);
  chacha20_xor(key, 1, nonce, plaintext, {out.data(), plaintext.size()});
  auto tag = aead_tag(key, nonce, {out.data(), plaintext.size()}, aad);
  std::memcpy(out.data() + plaintext.size(), tag.data(), kAeadTagLen);
  return out;
}

std::vector<uint8_t> aead_open(const AeadKey& key, const AeadNonce& nonce,
                               std::span<const uint8_t> sealed,
                               std::span<const uint8_t> aad) {
  if (sealed.size() < kAeadTagLen) fail(Errc::AuthFailure, "sealed payload shorter than tag");
  auto ciphertext = sealed.first(sealed.size() - kAeadTagLen);
  auto expect = aead_tag(key, nonce, ciphertext, aad);
  // constant-time compare
  uint8_t diff = 0;
  const uint8_t* stored = sealed.data() + ciphertext.size();
  for (size_t i = 0; i < kAeadTagLen; ++i) diff |= uint8_t(expect[i] ^ stored[i]);
  if (diff != 0) fail(Errc::AuthFailure, "authentication tag mismatch");
  std::vector<uint8_t> out(ciphertext.size());
  chacha20_xor(key, 1, nonce, ciphertext, out);
  return out;
}

}  // namespace wg
