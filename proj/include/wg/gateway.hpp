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
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wg/aead.hpp"
#include "wg/audit.hpp"
#include "wg/poolstore.hpp"
#include "wg/rng.hpp"

namespace wg {
struct StateIo;
}

namespace wg::gateway {

enum class Tier { S3Cache, S3Secure, S3General };
const char* tier_name(Tier tier) noexcept;
Tier parse_tier(std::string_view text);
poolstore::PoolRole pool_role_for(Tier tier) noexcept;

struct LifecyclePolicy {
  double expiration_days = 60.0;  // must be >= 1
};

struct ObjectMeta {
  std::string key;
  uint64_t size = 0;       // plaintext bytes
  int64_t created_ts = 0;  // the only stored timestamp
  std::string content_hash;     // hex SHA-256 of the plaintext
  std::string sse_fingerprint;  // hex digest of the customer key; empty if unencrypted
  std::array<uint8_t, 12> sse_nonce{};

  bool operator==(const ObjectMeta&) const = default;
};

struct Bucket {
  std::string name;
  Tier tier = Tier::S3General;
  std::string owner;  // project id
  uint64_t quota_bytes = 0;
  std::optional<LifecyclePolicy> lifecycle;
  int64_t created_ts = 0;
  uint64_t usage_bytes = 0;
  std::map<std::string, ObjectMeta> objects;  // key -> metadata, lexicographic
};

struct ListPage {
  std::vector<ObjectMeta> items;
  std::optional<std::string> continuation;  // resume strictly after this key
};

/// 3-63 chars of lowercase alphanumerics and hyphens, alnum at both ends.
bool valid_bucket_name(std::string_view name);

/// Encryption key derived from the customer secret; the secret itself is
/// never stored, only its fingerprint.
AeadKey sse_derive_key(std::string_view customer_key);
std::string sse_fingerprint(std::string_view customer_key);

/// Tiered S3-subset object gateway. Buckets are unique per (tier, name);
/// payloads land on the pool serving the bucket's tier.
class Gateway {
 public:
  Gateway(poolstore::Cluster& cluster, audit::Log& log,
          std::function<bool(const std::string&)> project_is_dbgap, DeterministicRng& rng);

  Bucket& create_bucket(const std::string& actor, const std::string& project,
                        const std::string& name, Tier tier, uint64_t quota_bytes, int64_t now);

  ObjectMeta put_object(const std::string& actor, Tier tier, const std::string& bucket,
                        const std::string& key, std::span<const uint8_t> payload,
                        const std::optional<std::string>& customer_key, int64_t now);

  std::vector<uint8_t> get_object(const std::string& actor, Tier tier, const std::string& bucket,
                                  const std::string& key,
                                  const std::optional<std::string>& customer_key, int64_t now);

  /// Returns the freed plaintext bytes.
  uint64_t delete_object(const std::string& actor, Tier tier, const std::string& bucket,
                         const std::string& key, int64_t now);
  /// Sweeper-driven deletion; identical mechanics, distinct audit verb.
  uint64_t expire_object(const std::string& actor, Tier tier, const std::string& bucket,
                         const std::string& key, int64_t now);

  ListPage list_objects(Tier tier, const std::string& bucket, const std::string& prefix,
                        size_t max_keys, const std::optional<std::string>& continuation) const;

  void set_lifecycle(const std::string& actor, Tier tier, const std::string& bucket,
                     LifecyclePolicy policy, int64_t now);

  const Bucket* find_bucket(Tier tier, const std::string& name) const;
  Bucket bucket_info(Tier tier, const std::string& name) const;
  std::vector<Bucket> buckets_in_tier(Tier tier) const;
  std::vector<Bucket> all_buckets() const;
  /// Name-only resolution for the HTTP facade; tiers searched in declared
  /// order (s3cache, s3secure, s3general), first match wins.
  std::optional<Tier> resolve_tier_by_name(const std::string& name) const;

  uint64_t tier_logical_bytes(Tier tier) const;
  uint64_t cache_pool_quota_bytes() const;

  /// Held by the lifecycle sweeper for its whole pass; the mutex is
  /// recursive so the sweeper's own deletions re-enter freely.
  std::unique_lock<std::recursive_mutex> exclusive_access() const;

 private:
  friend struct wg::StateIo;

  static std::string bucket_slot(Tier tier, std::string_view name);
  Bucket& bucket_locked(Tier tier, const std::string& name);
  const Bucket& bucket_locked(Tier tier, const std::string& name) const;
  std::string pool_name_for(Tier tier) const;
  uint64_t remove_locked(const std::string& actor, Tier tier, const std::string& bucket,
                         const std::string& key, int64_t now, const char* action);

  poolstore::Cluster& cluster_;
  audit::Log& audit_;
  std::function<bool(const std::string&)> project_is_dbgap_;
  DeterministicRng& rng_;

  mutable std::recursive_mutex mu_;
  std::map<std::string, Bucket> buckets_;  // slot "tier/name" -> bucket
};

}  // namespace wg::gateway
