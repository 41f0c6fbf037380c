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
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wg {
struct StateIo;
}

namespace wg::poolstore {

enum class Scheme { Replicated, ErasureCoded };

/// Redundancy settings are fixed at pool creation.
struct Redundancy {
  Scheme scheme = Scheme::Replicated;
  unsigned copies = 1;        // replicated only
  unsigned data_shards = 0;   // erasure-coded k
  unsigned parity_shards = 0; // erasure-coded m

  static Redundancy replicated(unsigned r);
  static Redundancy erasure_coded(unsigned k, unsigned m);

  unsigned stripe_width() const;
  /// Backend bytes written per logical byte: r, or (k+m)/k.
  double amplification() const;

  std::string to_string() const;  // "rep:3" or "ec:4,2"
  static Redundancy parse(std::string_view text);

  bool operator==(const Redundancy&) const = default;
};

enum class PoolRole { Block, S3Cache, S3Secure, S3General };
const char* pool_role_name(PoolRole role) noexcept;
PoolRole parse_pool_role(std::string_view text);

struct PoolSpec {
  std::string name;
  Redundancy redundancy;
  uint64_t quota_bytes = 0;  // cap on logical bytes stored
  PoolRole role = PoolRole::Block;
};

struct ShardLocation {
  uint32_t osd_id = 0;
  uint32_t shard_index = 0;
  bool operator==(const ShardLocation&) const = default;
};

/// Placement of one object: which OSD holds which shard.
struct StripeMap {
  std::string object_id;
  uint64_t shard_size = 0;    // bytes per shard (padded size for EC)
  uint64_t logical_size = 0;  // true payload length
  Redundancy scheme;
  std::vector<ShardLocation> locations;  // ordered by shard_index

  bool operator==(const StripeMap&) const = default;
};

/// One simulated storage daemon.
struct OsdNode {
  uint32_t id = 0;
  uint64_t capacity_bytes = 0;
  bool up = true;
  bool encrypted_at_rest = true;
  std::map<std::string, std::vector<uint8_t>> shards;  // shard key -> bytes

  uint64_t stored_bytes() const;
};

std::string shard_key(std::string_view pool, std::string_view object_id, uint32_t shard_index);

struct RepairReport {
  struct Row {
    std::string object_id;
    unsigned shards_rebuilt = 0;
    uint64_t bytes_rebuilt = 0;
    std::string status;  // repaired | unrecoverable
  };
  std::vector<Row> rows;
  unsigned stripes_repaired = 0;
  unsigned stripes_unrecoverable = 0;
  uint64_t bytes_rebuilt = 0;

  std::string to_table() const;
};

struct AccountingInfo {
  uint64_t logical_bytes = 0;
  uint64_t backend_bytes = 0;
  double amplification = 0.0;  // backend / logical; 0 when empty
};

class Cluster;

class Pool {
 public:
  const PoolSpec& spec() const { return spec_; }
  uint64_t logical_usage() const { return logical_usage_; }
  const std::map<std::string, StripeMap>& objects() const { return objects_; }

 private:
  friend class Cluster;
  friend struct wg::StateIo;
  PoolSpec spec_;
  uint64_t logical_usage_ = 0;
  std::map<std::string, StripeMap> objects_;
};

/// Rendezvous score used to rank OSDs for one shard; deterministic in
/// (pool, object, shard index, osd). Higher wins, ties broken by lower id.
uint64_t placement_score(std::string_view pool, std::string_view object_id,
                         uint32_t shard_index, uint32_t osd_id);

/// A set of OSDs plus the pools carved out of them. Public operations are
/// internally synchronized; handles may be shared across threads.
class Cluster {
 public:
  Cluster() = default;
  Cluster(Cluster&& other) noexcept;

  uint32_t add_osd(uint64_t capacity_bytes, bool encrypted_at_rest = true);

  Pool& create_pool(const PoolSpec& spec);
  bool has_pool(std::string_view name) const;
  const Pool& pool(std::string_view name) const;
  std::vector<std::string> pool_names() const;
  /// First pool with the given role, if any.
  std::optional<std::string> pool_for_role(PoolRole role) const;

  StripeMap place_shards(std::string_view pool, std::string_view object_id,
                         unsigned stripe_width) const;

  /// Stores a payload under the pool's redundancy scheme.
  /// Returns the stripe map and the backend bytes written.
  std::pair<StripeMap, uint64_t> write_object(std::string_view pool, std::string_view object_id,
                                              std::span<const uint8_t> payload);

  std::vector<uint8_t> read_object(std::string_view pool, std::string_view object_id) const;
  bool has_object(std::string_view pool, std::string_view object_id) const;
  /// Returns freed logical bytes.
  uint64_t remove_object(std::string_view pool, std::string_view object_id);

  void fail_osd(uint32_t id);
  void revive_osd(uint32_t id);
  RepairReport repair(std::string_view pool);

  AccountingInfo accounting(std::string_view pool) const;

  const OsdNode& osd(uint32_t id) const;
  std::vector<uint32_t> osd_ids() const;
  size_t up_osd_count() const;
  uint64_t raw_capacity_bytes() const;

 private:
  friend struct wg::StateIo;

  const Pool& pool_locked(std::string_view name) const;
  Pool& pool_mut_locked(std::string_view name);
  StripeMap place_locked(const Pool& pool, std::string_view object_id,
                         unsigned stripe_width) const;
  void erase_stripe_locked(const std::string& pool_name, const StripeMap& stripe);
  std::vector<uint8_t> read_locked(const Pool& pool, const StripeMap& stripe) const;

  mutable std::mutex mu_;
  std::map<uint32_t, OsdNode> osds_;
  std::map<std::string, Pool> pools_;
  uint32_t next_osd_id_ = 0;
};

}  // namespace wg::poolstore
