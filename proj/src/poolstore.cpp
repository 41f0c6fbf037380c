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

#include "wg/poolstore.hpp"

#include <algorithm>
#include <sstream>

#include "wg/digest.hpp"
#include "wg/errors.hpp"
#include "wg/rs.hpp"

namespace wg::poolstore {

Redundancy Redundancy::replicated(unsigned r) {
  if (r < 1) fail(Errc::ValidationError, "replica count must be >= 1");
  Redundancy red;
  red.scheme = Scheme::Replicated;
  red.copies = r;
  return red;
}

Redundancy Redundancy::erasure_coded(unsigned k, unsigned m) {
  if (k < 1 || m < 1) fail(Errc::ValidationError, "erasure coding requires k >= 1 and m >= 1");
  Redundancy red;
  red.scheme = Scheme::ErasureCoded;
  red.copies = 0;
  red.data_shards = k;
  red.parity_shards = m;
  return red;
}

unsigned Redundancy::stripe_width() const {
  return scheme == Scheme::Replicated ? copies : data_shards + parity_shards;
}

double Redundancy::amplification() const {
  if (scheme == Scheme::Replicated) return double(copies);
  return double(data_shards + parity_shards) / double(data_shards);
}

std::string Redundancy::to_string() const {
  std::ostringstream os;
  if (scheme == Scheme::Replicated)
    os << "rep:" << copies;
  else
    os << "ec:" << data_shards << "," << parity_shards;
  return os.str();
}

Redundancy Redundancy::parse(std::string_view text) {
  auto parse_uint = [](std::string_view s) -> std::optional<unsigned> {
    if (s.empty()) return std::nullopt;
    unsigned v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') return std::nullopt;
      v = v * 10 + unsigned(c - '0');
      if (v > 100000) return std::nullopt;
    }
    return v;
  };
  if (text.starts_with("rep:")) {
    auto r = parse_uint(text.substr(4));
    if (r) return replicated(*r);
  } else if (text.starts_with("ec:")) {
    auto rest = text.substr(3);
    size_t comma = rest.find(',');
    if (comma != std::string_view::npos) {
      auto k = parse_uint(rest.substr(0, comma));
      auto m = parse_uint(rest.substr(comma + 1));
      if (k && m) return erasure_coded(*k, *m);
    }
  }
  fail(Errc::ValidationError, "redundancy must look like rep:3 or ec:4,2");
}

const char* pool_role_name(PoolRole role) noexcept {
  switch (role) {
    case PoolRole::Block: return "block";
    case PoolRole::S3Cache: return "s3cache";
    case PoolRole::S3Secure: return "s3secure";
    case PoolRole::S3General: return "s3general";
  }
  return "block";
}

PoolRole parse_pool_role(std::string_view text) {
  if (text == "block") return PoolRole::Block;
  if (text == "s3cache") return PoolRole::S3Cache;
  if (text == "s3secure") return PoolRole::S3Secure;
  if (text == "s3general") return PoolRole::S3General;
  fail(Errc::ValidationError, "unknown pool role: " + std::string(text));
}

uint64_t OsdNode::stored_bytes() const {
  uint64_t total = 0;
  for (const auto& [key, bytes] : shards) {
    (void)key;
    total += bytes.size();
  }
  return total;
}

std::string shard_key(std::string_view pool, std::string_view object_id, uint32_t shard_index) {
  std::string key;
  key.reserve(pool.size() + object_id.size() + 12);
  key.append(pool);
  key.push_back(0x1f);
  key.append(object_id);
  key.push_back('#');
  key.append(std::to_string(shard_index));
  return key;
}

uint64_t placement_score(std::string_view pool, std::string_view object_id,
                         uint32_t shard_index, uint32_t osd_id) {
  std::string material;
  material.reserve(pool.size() + object_id.size() + 24);
  material.append(pool);
  material.push_back(0x1f);
  material.append(object_id);
  material.push_back(0x1f);
  material.append(std::to_string(shard_index));
  material.push_back(0x1f);
  material.append(std::to_string(osd_id));
  return mix64(fnv1a64(material));
}

std::string RepairReport::to_table() const {
  std::ostringstream os;
  os << "object\tshards_rebuilt\tbytes_rebuilt\tstatus\n";
  for (const Row& row : rows)
    os << row.object_id << '\t' << row.shards_rebuilt << '\t' << row.bytes_rebuilt << '\t'
       << row.status << '\n';
  os << "total\tstripes_repaired=" << stripes_repaired
     << "\tstripes_unrecoverable=" << stripes_unrecoverable << "\tbytes=" << bytes_rebuilt
     << '\n';
  return os.str();
}

Cluster::Cluster(Cluster&& other) noexcept {
  std::lock_guard lock(other.mu_);
  osds_ = std::move(other.osds_);
  pools_ = std::move(other.pools_);
  next_osd_id_ = other.next_osd_id_;
}

uint32_t Cluster::add_osd(uint64_t capacity_bytes, bool encrypted_at_rest) {
  std::lock_guard lock(mu_);
  OsdNode node;
  node.id = next_osd_id_++;
  node.capacity_bytes = capacity_bytes;
  node.encrypted_at_rest = encrypted_at_rest;
  uint32_t id = node.id;
  osds_.emplace(id, std::move(node));
  return id;
}

Pool& Cluster::create_pool(const PoolSpec& spec) {
  std::lock_guard lock(mu_);
  if (spec.name.empty()) fail(Errc::ValidationError, "pool name must be non-empty");
  if (pools_.count(spec.name)) fail(Errc::DuplicatePoolName, spec.name);
  unsigned width = spec.redundancy.stripe_width();
  size_t up = 0;
  for (const auto& [id, osd] : osds_) {
    (void)id;
    if (osd.up) ++up;
  }
  if (up < width)
    fail(Errc::InsufficientOsds, "stripe width " + std::to_string(width) + " needs " +
                                     std::to_string(width) + " up OSDs, have " +
                                     std::to_string(up));
  // Partitioning invariant: the sum of pool quotas, written at the worst
  // amplification present, must fit in the raw capacity.
  uint64_t raw = 0;
  for (const auto& [id, osd] : osds_) {
    (void)id;
    raw += osd.capacity_bytes;
  }
  double max_amp = spec.redundancy.amplification();
  uint64_t quota_sum = spec.quota_bytes;
  for (const auto& [name, pool] : pools_) {
    (void)name;
    max_amp = std::max(max_amp, pool.spec_.redundancy.amplification());
    quota_sum += pool.spec_.quota_bytes;
  }
  if (double(quota_sum) * max_amp > double(raw))
    fail(Errc::ValidationError,
         "pool quotas exceed raw capacity divided by the worst amplification");
  Pool pool;
  pool.spec_ = spec;
  auto [it, inserted] = pools_.emplace(spec.name, std::move(pool));
  (void)inserted;
  return it->second;
}

bool Cluster::has_pool(std::string_view name) const {
  std::lock_guard lock(mu_);
  return pools_.count(std::string(name)) > 0;
}

const Pool& Cluster::pool(std::string_view name) const {
  std::lock_guard lock(mu_);
  return pool_locked(name);
}

const Pool& Cluster::pool_locked(std::string_view name) const {
  auto it = pools_.find(std::string(name));
  if (it == pools_.end()) fail(Errc::UnknownResource, "no such pool: " + std::string(name));
  return it->second;
}

Pool& Cluster::pool_mut_locked(std::string_view name) {
  auto it = pools_.find(std::string(name));
  if (it == pools_.end()) fail(Errc::UnknownResource, "no such pool: " + std::string(name));
  return it->second;
}

std::vector<std::string> Cluster::pool_names() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> names;
  names.reserve(pools_.size());
  for (const auto& [name, pool] : pools_) {
    (void)pool;
    names.push_back(name);
  }
  return names;
}

std::optional<std::string> Cluster::pool_for_role(PoolRole role) const {
  std::lock_guard lock(mu_);
  for (const auto& [name, pool] : pools_)
    if (pool.spec_.role == role) return name;
  return std::nullopt;
}

StripeMap Cluster::place_locked(const Pool& pool, std::string_view object_id,
                                unsigned stripe_width) const {
  std::vector<uint32_t> up_ids;
  for (const auto& [id, osd] : osds_)
    if (osd.up) up_ids.push_back(id);
  if (up_ids.size() < stripe_width)
    fail(Errc::InsufficientOsds, "stripe width " + std::to_string(stripe_width) +
                                     " exceeds up OSD count " + std::to_string(up_ids.size()));
  StripeMap stripe;
  stripe.object_id = std::string(object_id);
  stripe.scheme = pool.spec_.redundancy;
  std::vector<bool> used(up_ids.size(), false);
  for (uint32_t index = 0; index < stripe_width; ++index) {
    uint64_t best_score = 0;
    size_t best = size_t(-1);
    for (size_t i = 0; i < up_ids.size(); ++i) {
      if (used[i]) continue;
      uint64_t score = placement_score(pool.spec_.name, object_id, index, up_ids[i]);
      if (best == size_t(-1) || score > best_score ||
          (score == best_score && up_ids[i] < up_ids[best])) {
        best = i;
        best_score = score;
      }
    }
    used[best] = true;
    stripe.locations.push_back({up_ids[best], index});
  }
  return stripe;
}

StripeMap Cluster::place_shards(std::string_view pool_name, std::string_view object_id,
                                unsigned stripe_width) const {
  std::lock_guard lock(mu_);
  return place_locked(pool_locked(pool_name), object_id, stripe_width);
}

void Cluster::erase_stripe_locked(const std::string& pool_name, const StripeMap& stripe) {
  for (const ShardLocation& loc : stripe.locations) {
    auto osd_it = osds_.find(loc.osd_id);
    if (osd_it != osds_.end())
      osd_it->second.shards.erase(shard_key(pool_name, stripe.object_id, loc.shard_index));
  }
}

std::pair<StripeMap, uint64_t> Cluster::write_object(std::string_view pool_name,
                                                     std::string_view object_id,
                                                     std::span<const uint8_t> payload) {
  std::lock_guard lock(mu_);
  Pool& pool = pool_mut_locked(pool_name);
  const Redundancy& red = pool.spec_.redundancy;

  uint64_t previous_size = 0;
  auto existing = pool.objects_.find(std::string(object_id));
  if (existing != pool.objects_.end()) previous_size = existing->second.logical_size;
  if (pool.logical_usage_ - previous_size + payload.size() > pool.spec_.quota_bytes)
    fail(Errc::PoolQuotaExceeded, pool.spec_.name);

  StripeMap stripe = place_locked(pool, object_id, red.stripe_width());
  stripe.logical_size = payload.size();

  std::vector<std::vector<uint8_t>> shard_bytes;
  if (red.scheme == Scheme::Replicated) {
    stripe.shard_size = payload.size();
    shard_bytes.assign(red.copies, std::vector<uint8_t>(payload.begin(), payload.end()));
  } else {
    unsigned k = red.data_shards;
    uint64_t shard_size = payload.empty() ? 0 : (payload.size() + k - 1) / k;
    stripe.shard_size = shard_size;
    std::vector<rs::Block> data(k, rs::Block(shard_size, 0));
    for (uint64_t i = 0; i < payload.size(); ++i) data[i / shard_size][i % shard_size] = payload[i];
    auto parity = rs::encode(k, red.parity_shards, data);
    shard_bytes = std::move(data);
    for (auto& p : parity) shard_bytes.push_back(std::move(p));
  }

  // Capacity check before any mutation.
  for (const ShardLocation& loc : stripe.locations) {
    const OsdNode& osd = osds_.at(loc.osd_id);
    uint64_t incoming = shard_bytes[loc.shard_index].size();
    if (osd.stored_bytes() + incoming > osd.capacity_bytes)
      fail(Errc::InsufficientOsds,
           "osd " + std::to_string(loc.osd_id) + " lacks capacity for shard");
  }

  if (existing != pool.objects_.end()) {
    erase_stripe_locked(pool.spec_.name, existing->second);
    pool.logical_usage_ -= previous_size;
    pool.objects_.erase(existing);
  }

  uint64_t backend = 0;
  for (const ShardLocation& loc : stripe.locations) {
    backend += shard_bytes[loc.shard_index].size();
    osds_.at(loc.osd_id)
        .shards[shard_key(pool.spec_.name, stripe.object_id, loc.shard_index)] =
        std::move(shard_bytes[loc.shard_index]);
  }
  pool.logical_usage_ += payload.size();
  pool.objects_[stripe.object_id] = stripe;
  return {stripe, backend};
}

std::vector<uint8_t> Cluster::read_locked(const Pool& pool, const StripeMap& stripe) const {
  const Redundancy& red = stripe.scheme;
  if (red.scheme == Scheme::Replicated) {
    for (const ShardLocation& loc : stripe.locations) {
      auto osd_it = osds_.find(loc.osd_id);
      if (osd_it == osds_.end() || !osd_it->second.up) continue;
      auto shard_it =
          osd_it->second.shards.find(shard_key(pool.spec_.name, stripe.object_id, loc.shard_index));
      if (shard_it != osd_it->second.shards.end()) return shard_it->second;
    }
    fail(Errc::Unrecoverable, "no live replica of " + stripe.object_id);
  }

  unsigned k = red.data_shards;
  std::map<unsigned, rs::Block> available;
  for (const ShardLocation& loc : stripe.locations) {
    auto osd_it = osds_.find(loc.osd_id);
    if (osd_it == osds_.end() || !osd_it->second.up) continue;
    auto shard_it =
        osd_it->second.shards.find(shard_key(pool.spec_.name, stripe.object_id, loc.shard_index));
    if (shard_it != osd_it->second.shards.end()) available[loc.shard_index] = shard_it->second;
  }
  if (available.size() < k)
    fail(Errc::Unrecoverable, "fewer than k shards reachable for " + stripe.object_id);
  auto data = rs::decode(k, red.parity_shards, available);
  std::vector<uint8_t> payload;
  payload.reserve(size_t(stripe.shard_size) * k);
  for (unsigned i = 0; i < k; ++i) payload.insert(payload.end(), data[i].begin(), data[i].end());
  payload.resize(stripe.logical_size);  // strip zero padding
  return payload;
}

std::vector<uint8_t> Cluster::read_object(std::string_view pool_name,
                                          std::string_view object_id) const {
  std::lock_guard lock(mu_);
  const Pool& pool = pool_locked(pool_name);
  auto it = pool.objects_.find(std::string(object_id));
  if (it == pool.objects_.end())
    fail(Errc::ObjectNotFound, std::string(pool_name) + "/" + std::string(object_id));
  return read_locked(pool, it->second);
}

bool Cluster::has_object(std::string_view pool_name, std::string_view object_id) const {
  std::lock_guard lock(mu_);
  const Pool& pool = pool_locked(pool_name);
  return pool.objects_.count(std::string(object_id)) > 0;
}

uint64_t Cluster::remove_object(std::string_view pool_name, std::string_view object_id) {
  std::lock_guard lock(mu_);
  Pool& pool = pool_mut_locked(pool_name);
  auto it = pool.objects_.find(std::string(object_id));
  if (it == pool.objects_.end())
    fail(Errc::ObjectNotFound, std::string(pool_name) + "/" + std::string(object_id));
  uint64_t freed = it->second.logical_size;
  erase_stripe_locked(pool.spec_.name, it->second);
  pool.logical_usage_ -= freed;
  pool.objects_.erase(it);
  return freed;
}

void Cluster::fail_osd(uint32_t id) {
  std::lock_guard lock(mu_);
  auto it = osds_.find(id);
  if (it == osds_.end()) fail(Errc::UnknownResource, "no such OSD: " + std::to_string(id));
  it->second.up = false;
}

void Cluster::revive_osd(uint32_t id) {
  std::lock_guard lock(mu_);
  auto it = osds_.find(id);
  if (it == osds_.end()) fail(Errc::UnknownResource, "no such OSD: " + std::to_string(id));
  it->second.up = true;
}

RepairReport Cluster::repair(std::string_view pool_name) {
  std::lock_guard lock(mu_);
  Pool& pool = pool_mut_locked(pool_name);
  RepairReport report;
  for (auto& [object_id, stripe] : pool.objects_) {
    std::vector<size_t> lost;
    for (size_t i = 0; i < stripe.locations.size(); ++i) {
      auto osd_it = osds_.find(stripe.locations[i].osd_id);
      if (osd_it == osds_.end() || !osd_it->second.up) lost.push_back(i);
    }
    if (lost.empty()) continue;

    RepairReport::Row row;
    row.object_id = object_id;

    std::vector<uint8_t> payload;
    bool recoverable = true;
    try {
      payload = read_locked(pool, stripe);
    } catch (const Error&) {
      recoverable = false;
    }
    if (!recoverable) {
      row.status = "unrecoverable";
      report.rows.push_back(std::move(row));
      ++report.stripes_unrecoverable;
      continue;
    }

    // Rebuild shard bytes for the whole stripe once.
    std::vector<std::vector<uint8_t>> shard_bytes;
    const Redundancy& red = stripe.scheme;
    if (red.scheme == Scheme::Replicated) {
      shard_bytes.assign(red.copies, payload);
    } else {
      unsigned k = red.data_shards;
      uint64_t shard_size = stripe.shard_size;
      std::vector<rs::Block> data(k, rs::Block(shard_size, 0));
      for (uint64_t i = 0; i < payload.size(); ++i)
        data[i / shard_size][i % shard_size] = payload[i];
      auto parity = rs::encode(k, red.parity_shards, data);
      shard_bytes = std::move(data);
      for (auto& p : parity) shard_bytes.push_back(std::move(p));
    }

    // Candidate targets: up OSDs not already holding a live member.
    std::vector<uint32_t> holding;
    for (size_t i = 0; i < stripe.locations.size(); ++i) {
      bool is_lost = std::find(lost.begin(), lost.end(), i) != lost.end();
      if (!is_lost) holding.push_back(stripe.locations[i].osd_id);
    }
    bool moved_all = true;
    for (size_t i : lost) {
      ShardLocation& loc = stripe.locations[i];
      uint64_t best_score = 0;
      uint32_t best_id = 0;
      bool found = false;
      for (const auto& [cand_id, cand] : osds_) {
        if (!cand.up) continue;
        if (std::find(holding.begin(), holding.end(), cand_id) != holding.end()) continue;
        uint64_t need = shard_bytes[loc.shard_index].size();
        if (cand.stored_bytes() + need > cand.capacity_bytes) continue;
        uint64_t score = placement_score(pool.spec_.name, object_id, loc.shard_index, cand_id);
        if (!found || score > best_score || (score == best_score && cand_id < best_id)) {
          found = true;
          best_score = score;
          best_id = cand_id;
        }
      }
      if (!found) {
        moved_all = false;
        break;
      }
      // Drop the dead copy, place the rebuilt shard.
      auto old_it = osds_.find(loc.osd_id);
      if (old_it != osds_.end())
        old_it->second.shards.erase(shard_key(pool.spec_.name, object_id, loc.shard_index));
      osds_.at(best_id).shards[shard_key(pool.spec_.name, object_id, loc.shard_index)] =
          shard_bytes[loc.shard_index];
      loc.osd_id = best_id;
      holding.push_back(best_id);
      ++row.shards_rebuilt;
      row.bytes_rebuilt += shard_bytes[loc.shard_index].size();
    }
    if (!moved_all && row.shards_rebuilt == 0) {
      row.status = "unrecoverable";
      ++report.stripes_unrecoverable;
    } else if (!moved_all) {
      row.status = "partial";
      ++report.stripes_unrecoverable;
    } else {
      row.status = "repaired";
      ++report.stripes_repaired;
    }
    report.bytes_rebuilt += row.bytes_rebuilt;
    report.rows.push_back(std::move(row));
  }
  return report;
}

AccountingInfo Cluster::accounting(std::string_view pool_name) const {
  std::lock_guard lock(mu_);
  const Pool& pool = pool_locked(pool_name);
  AccountingInfo info;
  info.logical_bytes = pool.logical_usage_;
  for (const auto& [object_id, stripe] : pool.objects_) {
    (void)object_id;
    info.backend_bytes += stripe.shard_size * stripe.locations.size();
  }
  info.amplification =
      info.logical_bytes == 0 ? 0.0 : double(info.backend_bytes) / double(info.logical_bytes);
  return info;
}

const OsdNode& Cluster::osd(uint32_t id) const {
  std::lock_guard lock(mu_);
  auto it = osds_.find(id);
  if (it == osds_.end()) fail(Errc::UnknownResource, "no such OSD: " + std::to_string(id));
  return it->second;
}

std::vector<uint32_t> Cluster::osd_ids() const {
  std::lock_guard lock(mu_);
  std::vector<uint32_t> ids;
  ids.reserve(osds_.size());
  for (const auto& [id, osd] : osds_) {
    (void)osd;
    ids.push_back(id);
  }
  return ids;
}

size_t Cluster::up_osd_count() const {
  std::lock_guard lock(mu_);
  size_t up = 0;
  for (const auto& [id, osd] : osds_) {
    (void)id;
    if (osd.up) ++up;
  }
  return up;
}

uint64_t Cluster::raw_capacity_bytes() const {
  std::lock_guard lock(mu_);
  uint64_t total = 0;
  for (const auto& [id, osd] : osds_) {
    (void)id;
    total += osd.capacity_bytes;
  }
  return total;
}

}  // namespace wg::poolstore
