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

#include "wg/rs.hpp"

#include <array>

#include "wg/errors.hpp"

namespace wg::rs {

namespace {

constexpr unsigned kPrimitivePoly = 0x11d;  // x^8 + x^4 + x^3 + x^2 + 1

struct GfTables {
  std::array<uint8_t, 512> exp;
  std::array<uint8_t, 256> log;

  GfTables() {
    unsigned x = 1;
    for (unsigned i = 0; i < 255; ++i) {
      exp[i] = uint8_t(x);
      log[x] = uint8_t(i);
      x <<= 1;
      if (x & 0x100) x ^= kPrimitivePoly;
    }
    for (unsigned i = 255; i < 512; ++i) exp[i] = exp[i - 255];
    log[0] = 0;  // never consulted for zero
  }
};

const GfTables& tables() {
  static const GfTables t;
  return t;
}

using Matrix = std::vector<std::vector<uint8_t>>;

uint8_t gf_pow(uint8_t a, unsigned e) {
  if (e == 0) return 1;
  if (a == 0) return 0;
  const auto& t = tables();
  return t.exp[(unsigned(t.log[a]) * e) % 255];
}

/// Gauss-Jordan inversion over GF(2^8); the matrix must be square.
Matrix invert(Matrix m) {
  const size_t n = m.size();
  Matrix inv(n, std::vector<uint8_t>(n, 0));
  for (size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    while (pivot < n && m[pivot][col] == 0) ++pivot;
    if (pivot == n) fail(Errc::TooManyErasures, "singular shard matrix");
    std::swap(m[pivot], m[col]);
    std::swap(inv[pivot], inv[col]);
    uint8_t piv_inv = gf_inv(m[col][col]);
    for (size_t j = 0; j < n; ++j) {
      m[col][j] = gf_mul(m[col][j], piv_inv);
      inv[col][j] = gf_mul(inv[col][j], piv_inv);
    }
    for (size_t row = 0; row < n; ++row) {
      if (row == col || m[row][col] == 0) continue;
      uint8_t factor = m[row][col];
      for (size_t j = 0; j < n; ++j) {
        m[row][j] ^= gf_mul(factor, m[col][j]);
        inv[row][j] ^= gf_mul(factor, inv[col][j]);
      }
    }
  }
  return inv;
}

void check_params(unsigned k, unsigned m) {
  if (k < 1 || m < 1 || k + m > 255)
    fail(Errc::ValidationError, "erasure coding requires 1 <= k, 1 <= m, k+m <= 255");
}

/// Full (k+m) x k systematic generator: vandermonde * inv(top k x k block).
Matrix generator(unsigned k, unsigned m) {
  Matrix vand(k + m, std::vector<uint8_t>(k));
  for (unsigned i = 0; i < k + m; ++i)
    for (unsigned j = 0; j < k; ++j) vand[i][j] = gf_pow(uint8_t(i), j);
  Matrix top(vand.begin(), vand.begin() + k);
  Matrix top_inv = invert(std::move(top));
  Matrix gen(k + m, std::vector<uint8_t>(k, 0));
  for (unsigned i = 0; i < k + m; ++i)
    for (unsigned j = 0; j < k; ++j) {
      uint8_t acc = 0;
      for (unsigned t = 0; t < k; ++t) acc ^= gf_mul(vand[i][t], top_inv[t][j]);
      gen[i][j] = acc;
    }
  return gen;
}

void accumulate(Block& out, uint8_t coeff, const Block& in) {
  if (coeff == 0) return;
  if (coeff == 1) {
    for (size_t i = 0; i < in.size(); ++i) out[i] ^= in[i];
    return;
  }
  const auto& t = tables();
  unsigned log_c = t.log[coeff];
  for (size_t i = 0; i < in.size(); ++i) {
    uint8_t v = in[i];
    if (v != 0) out[i] ^= t.exp[log_c + t.log[v]];
  }
}

size_t checked_uniform_length(const std::vector<Block>& blocks) {
  size_t len = blocks.empty() ? 0 : blocks.front().size();
  for (const auto& b : blocks)
    if (b.size() != len) fail(Errc::LengthMismatch, "shard blocks differ in length");
  return len;
}

}  // namespace

uint8_t gf_mul(uint8_t a, uint8_t b) {
  if (a == 0 || b == 0) return 0;
  const auto& t = tables();
  return t.exp[unsigned(t.log[a]) + unsigned(t.log[b])];
}

uint8_t gf_inv(uint8_t a) {
  if (a == 0) fail(Errc::ValidationError, "0 has no inverse in GF(2^8)");
  const auto& t = tables();
  return t.exp[255 - t.log[a]];
}

std::vector<uint8_t> generator_row(unsigned k, unsigned m, unsigned index) {
  check_params(k, m);
  if (index >= k + m) fail(Errc::ValidationError, "generator row out of range");
  return generator(k, m)[index];
}

std::vector<Block> encode(unsigned k, unsigned m, const std::vector<Block>& data) {
  check_params(k, m);
  if (data.size() != k) fail(Errc::LengthMismatch, "expected exactly k data blocks");
  size_t len = checked_uniform_length(data);
  Matrix gen = generator(k, m);
  std::vector<Block> parity(m, Block(len, 0));
  for (unsigned p = 0; p < m; ++p)
    for (unsigned j = 0; j < k; ++j) accumulate(parity[p], gen[k + p][j], data[j]);
  return parity;
}

std::vector<Block> decode(unsigned k, unsigned m, const std::map<unsigned, Block>& shards) {
  check_params(k, m);
  for (const auto& [idx, block] : shards) {
    (void)block;
    if (idx >= k + m) fail(Errc::ValidationError, "shard index out of range");
  }
  if (shards.size() < k) fail(Errc::TooManyErasures, "fewer than k shards present");

  // Fast path: all data shards survived.
  bool data_complete = true;
  for (unsigned i = 0; i < k; ++i)
    if (!shards.count(i)) {
      data_complete = false;
      break;
    }
  std::vector<Block> blocks;
  if (data_complete) {
    blocks.reserve(k);
    for (unsigned i = 0; i < k; ++i) blocks.push_back(shards.at(i));
    checked_uniform_length(blocks);
    return blocks;
  }

  // Pick the first k available shards, invert their generator rows.
  std::vector<unsigned> picked;
  for (const auto& [idx, block] : shards) {
    (void)block;
    picked.push_back(idx);
    if (picked.size() == k) break;
  }
  Matrix gen = generator(k, m);
  Matrix sub(k);
  std::vector<Block> present;
  present.reserve(k);
  for (unsigned r = 0; r < k; ++r) {
    sub[r] = gen[picked[r]];
    present.push_back(shards.at(picked[r]));
  }
  size_t len = checked_uniform_length(present);
  Matrix inv = invert(std::move(sub));
  std::vector<Block> data(k, Block(len, 0));
  for (unsigned i = 0; i < k; ++i)
    for (unsigned r = 0; r < k; ++r) accumulate(data[i], inv[i][r], present[r]);
  return data;
}

Block encode_shard(unsigned k, unsigned m, unsigned index, const std::vector<Block>& data) {
  check_params(k, m);
  if (data.size() != k) fail(Errc::LengthMismatch, "expected exactly k data blocks");
  if (index >= k + m) fail(Errc::ValidationError, "shard index out of range");
  if (index < k) return data[index];
  size_t len = checked_uniform_length(data);
  Matrix gen = generator(k, m);
  Block out(len, 0);
  for (unsigned j = 0; j < k; ++j) accumulate(out, gen[index][j], data[j]);
  return out;
}

}  // namespace wg::rs
