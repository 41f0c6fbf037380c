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

#include "wg/gateway.hpp"

#include <algorithm>

#include "wg/errors.hpp"

namespace wg::gateway {

namespace {

std::string object_resource(Tier tier, const std::string& bucket, const std::string& key) {
  return std::string("s3/") + tier_name(tier) + "/" + bucket + "/" + key;
}

std::string pool_object_id(const std::string& bucket, const std::string& key) {
  // Bucket names cannot contain '/', so this join is unambiguous.
  return bucket + "/" + key;
}

}  // namespace

const char* tier_name(Tier tier) noexcept {
  switch (tier) {
    case Tier::S3Cache: return "s3cache";
    case Tier::S3Secure: return "s3secure";
    case Tier::S3General: return "s3general";
  }
  return "s3general";
}

Tier parse_tier(std::string_view text) {
  if (text == "s3cache") return Tier::S3Cache;
  if (text == "s3secure") return Tier::S3Secure;
  if (text == "s3general") return Tier::S3General;
  fail(Errc::ValidationError, "unknown tier: " + std::string(text));
}

poolstore::PoolRole pool_role_for(Tier tier) noexcept {
  switch (tier) {
    case Tier::S3Cache: return poolstore::PoolRole::S3Cache;
    case Tier::S3Secure: return poolstore::PoolRole::S3Secure;
    case Tier::S3General: return poolstore::PoolRole::S3General;
  }
  return poolstore::PoolRole::S3General;
}

bool valid_bucket_name(std::string_view name) {
  if (name.size() < 3 || name.size() > 63) return false;
  auto alnum = [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); };
  if (!alnum(name.front()) || !alnum(name.back())) return false;
  for (char c : name)
    if (!alnum(c) && c != '-') return false;
  return true;
}

AeadKey sse_derive_key(std::string_view customer_key) {
  Sha256 h;
  h.update(std::string_view("sse-c/key/v1\x00", 13));
  h.update(customer_key);
  Digest d = h.finish();
  AeadKey key;
  std::copy(d.begin(), d.end(), key.begin());
  return key;
}

std::string sse_fingerprint(std::string_view customer_key) {
  Sha256 h;
  h.update(std::string_view("sse-c/fingerprint/v1\x00", 21));
  h.update(customer_key);
  return hex_encode(h.finish());
}

Gateway::Gateway(poolstore::Cluster& cluster, audit::Log& log,
                 std::function<bool(const std::string&)> project_is_dbgap, DeterministicRng& rng)
    : cluster_(cluster),
      audit_(log),
      project_is_dbgap_(std::move(project_is_dbgap)),
      rng_(rng) {}

std::string Gateway::bucket_slot(Tier tier, std::string_view name) {
  return std::string(tier_name(tier)) + "/" + std::string(name);
}

Bucket& Gateway::bucket_locked(Tier tier, const std::string& name) {
  auto it = buckets_.find(bucket_slot(tier, name));
  if (it == buckets_.end())
    fail(Errc::UnknownResource, "no such bucket: " + bucket_slot(tier, name));
  return it->second;
}

const Bucket& Gateway::bucket_locked(Tier tier, const std::string& name) const {
  auto it = buckets_.find(bucket_slot(tier, name));
  if (it == buckets_.end())
    fail(Errc::UnknownResource, "no such bucket: " + bucket_slot(tier, name));
  return it->second;
}

std::string Gateway::pool_name_for(Tier tier) const {
  auto name = cluster_.pool_for_role(pool_role_for(tier));
  if (!name)
    fail(Errc::UnknownResource,
         std::string("no pool serves tier ") + tier_name(tier));
  return *name;
}

Bucket& Gateway::create_bucket(const std::string& actor, const std::string& project,
                               const std::string& name, Tier tier, uint64_t quota_bytes,
                               int64_t now) {
  std::lock_guard lock(mu_);
  if (!valid_bucket_name(name)) fail(Errc::InvalidName, name);
  if ((tier == Tier::S3Cache || tier == Tier::S3Secure) &&
      !(project_is_dbgap_ && project_is_dbgap_(project))) {
    audit_.append(now, actor, "create-bucket", bucket_slot(tier, name), audit::Outcome::Denied);
    fail(Errc::TierForbidden,
         std::string(tier_name(tier)) + " requires a dbGaP-approved project");
  }
  std::string slot = bucket_slot(tier, name);
  if (buckets_.count(slot)) fail(Errc::NameTaken, slot);
  Bucket bucket;
  bucket.name = name;
  bucket.tier = tier;
  bucket.owner = project;
  bucket.quota_bytes = quota_bytes;
  bucket.created_ts = now;
  if (tier == Tier::S3Cache) bucket.lifecycle = LifecyclePolicy{};  // 60-day default
  auto [it, inserted] = buckets_.emplace(slot, std::move(bucket));
  (void)inserted;
  audit_.append(now, actor, "create-bucket", slot, audit::Outcome::Ok);
  return it->second;
}

ObjectMeta Gateway::put_object(const std::string& actor, Tier tier, const std::string& bucket_name,
                               const std::string& key, std::span<const uint8_t> payload,
                               const std::optional<std::string>& customer_key, int64_t now) {
  std::lock_guard lock(mu_);
  Bucket& bucket = bucket_locked(tier, bucket_name);
  const std::string resource = object_resource(tier, bucket_name, key);
  try {
    if (key.empty()) fail(Errc::InvalidName, "object key must be non-empty");
    uint64_t previous = 0;
    auto old = bucket.objects.find(key);
    if (old != bucket.objects.end()) previous = old->second.size;
    if (bucket.usage_bytes - previous + payload.size() > bucket.quota_bytes)
      fail(Errc::BucketQuotaExceeded, bucket_slot(tier, bucket_name));

    ObjectMeta meta;
    meta.key = key;
    meta.size = payload.size();
    meta.created_ts = now;
    meta.content_hash = hex_encode(sha256(payload));

    std::vector<uint8_t> stored;
    std::span<const uint8_t> to_store = payload;
    if (customer_key) {
      meta.sse_fingerprint = sse_fingerprint(*customer_key);
      meta.sse_nonce = rng_.next_nonce();
      stored = aead_seal(sse_derive_key(*customer_key), meta.sse_nonce, payload);
      to_store = stored;
    }

    cluster_.write_object(pool_name_for(tier), pool_object_id(bucket_name, key), to_store);
    bucket.usage_bytes = bucket.usage_bytes - previous + payload.size();
    bucket.objects[key] = meta;
    audit_.append(now, actor, "put-object", resource, audit::Outcome::Ok);
    return meta;
  } catch (const Error&) {
    audit_.append(now, actor, "put-object", resource, audit::Outcome::Error);
    throw;
  }
}

std::vector<uint8_t> Gateway::get_object(const std::string& actor, Tier tier,
                                         const std::string& bucket_name, const std::string& key,
                                         const std::optional<std::string>& customer_key,
                                         int64_t now) {
  std::lock_guard lock(mu_);
  Bucket& bucket = bucket_locked(tier, bucket_name);
  const std::string resource = object_resource(tier, bucket_name, key);
  try {
    auto it = bucket.objects.find(key);
    if (it == bucket.objects.end()) fail(Errc::NoSuchKey, resource);
    const ObjectMeta& meta = it->second;

    if (!meta.sse_fingerprint.empty()) {
      // Fingerprint gate: a wrong key is rejected before any decryption.
      if (!customer_key) fail(Errc::KeyRequired, resource);
      if (sse_fingerprint(*customer_key) != meta.sse_fingerprint)
        fail(Errc::KeyMismatch, resource);
    }
    auto stored = cluster_.read_object(pool_name_for(tier), pool_object_id(bucket_name, key));
    std::vector<uint8_t> payload;
    if (!meta.sse_fingerprint.empty())
      payload = aead_open(sse_derive_key(*customer_key), meta.sse_nonce, stored);
    else
      payload = std::move(stored);
    audit_.append(now, actor, "get-object", resource, audit::Outcome::Ok);
    return payload;
  } catch (const Error&) {
    audit_.append(now, actor, "get-object", resource, audit::Outcome::Error);
    throw;
  }
}

uint64_t Gateway::remove_locked(const std::string& actor, Tier tier,
                                const std::string& bucket_name, const std::string& key,
                                int64_t now, const char* action) {
  Bucket& bucket = bucket_locked(tier, bucket_name);
  const std::string resource = object_resource(tier, bucket_name, key);
  try {
    auto it = bucket.objects.find(key);
    if (it == bucket.objects.end()) fail(Errc::NoSuchKey, resource);
    cluster_.remove_object(pool_name_for(tier), pool_object_id(bucket_name, key));
    uint64_t freed = it->second.size;
    bucket.usage_bytes -= freed;
    bucket.objects.erase(it);
    audit_.append(now, actor, action, resource, audit::Outcome::Ok);
    return freed;
  } catch (const Error&) {
    audit_.append(now, actor, action, resource, audit::Outcome::Error);
    throw;
  }
}

uint64_t Gateway::delete_object(const std::string& actor, Tier tier,
                                const std::string& bucket_name, const std::string& key,
                                int64_t now) {
  std::lock_guard lock(mu_);
  return remove_locked(actor, tier, bucket_name, key, now, "delete-object");
}

uint64_t Gateway::expire_object(const std::string& actor, Tier tier,
                                const std::string& bucket_name, const std::string& key,
                                int64_t now) {
  std::lock_guard lock(mu_);
  return remove_locked(actor, tier, bucket_name, key, now, "expire-object");
}

ListPage Gateway::list_objects(Tier tier, const std::string& bucket_name,
                               const std::string& prefix, size_t max_keys,
                               const std::optional<std::string>& continuation) const {
  std::lock_guard lock(mu_);
  const Bucket& bucket = bucket_locked(tier, bucket_name);
  ListPage page;
  if (max_keys == 0) return page;
  auto it = prefix.empty() ? bucket.objects.begin() : bucket.objects.lower_bound(prefix);
  if (continuation && (prefix.empty() || *continuation >= prefix))
    it = bucket.objects.upper_bound(*continuation);
  for (; it != bucket.objects.end(); ++it) {
    if (!prefix.empty() && it->first.compare(0, prefix.size(), prefix) != 0) break;
    if (page.items.size() == max_keys) {
      page.continuation = page.items.back().key;
      break;
    }
    page.items.push_back(it->second);
  }
  return page;
}

void Gateway::set_lifecycle(const std::string& actor, Tier tier, const std::string& bucket_name,
                            LifecyclePolicy policy, int64_t now) {
  std::lock_guard lock(mu_);
  Bucket& bucket = bucket_locked(tier, bucket_name);
  const std::string resource = bucket_slot(tier, bucket_name);
  try {
    if (tier != Tier::S3Cache)
      fail(Errc::TierForbidden, "lifecycle policies only apply to the cache tier");
    if (!(policy.expiration_days >= 1.0))
      fail(Errc::ValidationError, "expiration must be at least 1 day");
    bucket.lifecycle = policy;
    audit_.append(now, actor, "set-lifecycle", resource, audit::Outcome::Ok);
  } catch (const Error&) {
    audit_.append(now, actor, "set-lifecycle", resource, audit::Outcome::Error);
    throw;
  }
}

const Bucket* Gateway::find_bucket(Tier tier, const std::string& name) const {
  std::lock_guard lock(mu_);
  auto it = buckets_.find(bucket_slot(tier, name));
  return it == buckets_.end() ? nullptr : &it->second;
}

Bucket Gateway::bucket_info(Tier tier, const std::string& name) const {
  std::lock_guard lock(mu_);
  return bucket_locked(tier, name);
}

std::vector<Bucket> Gateway::buckets_in_tier(Tier tier) const {
  std::lock_guard lock(mu_);
  std::vector<Bucket> out;
  for (const auto& [slot, bucket] : buckets_) {
    (void)slot;
    if (bucket.tier == tier) out.push_back(bucket);
  }
  return out;
}

std::vector<Bucket> Gateway::all_buckets() const {
  std::lock_guard lock(mu_);
  std::vector<Bucket> out;
  out.reserve(buckets_.size());
  for (const auto& [slot, bucket] : buckets_) {
    (void)slot;
    out.push_back(bucket);
  }
  return out;
}

std::optional<Tier> Gateway::resolve_tier_by_name(const std::string& name) const {
  std::lock_guard lock(mu_);
  for (Tier tier : {Tier::S3Cache, Tier::S3Secure, Tier::S3General})
    if (buckets_.count(bucket_slot(tier, name))) return tier;
  return std::nullopt;
}

uint64_t Gateway::tier_logical_bytes(Tier tier) const {
  std::lock_guard lock(mu_);
  uint64_t total = 0;
  for (const auto& [slot, bucket] : buckets_) {
    (void)slot;
    if (bucket.tier == tier) total += bucket.usage_bytes;
  }
  return total;
}

uint64_t Gateway::cache_pool_quota_bytes() const {
  return cluster_.pool(pool_name_for(Tier::S3Cache)).spec().quota_bytes;
}

std::unique_lock<std::recursive_mutex> Gateway::exclusive_access() const {
  return std::unique_lock(mu_);
}

}  // namespace wg::gateway
