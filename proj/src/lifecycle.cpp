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

#include "wg/lifecycle.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "wg/errors.hpp"

namespace wg::lifecycle {

namespace {

constexpr double kSecondsPerDay = 86400.0;

struct Candidate {
  std::string bucket;
  std::string key;
  int64_t created_ts;
  uint64_t size;
  double policy_days;
};

double age_days(int64_t now, int64_t created_ts) {
  return double(now - created_ts) / kSecondsPerDay;
}

std::vector<Candidate> cache_objects(const gateway::Gateway& gw, double default_days) {
  std::vector<Candidate> all;
  for (const auto& bucket : gw.buckets_in_tier(gateway::Tier::S3Cache)) {
    double days = bucket.lifecycle ? bucket.lifecycle->expiration_days : default_days;
    for (const auto& [key, meta] : bucket.objects)
      all.push_back({bucket.name, key, meta.created_ts, meta.size, days});
  }
  // Oldest first; ties resolved by name for determinism.
  std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    if (a.created_ts != b.created_ts) return a.created_ts < b.created_ts;
    if (a.bucket != b.bucket) return a.bucket < b.bucket;
    return a.key < b.key;
  });
  return all;
}

}  // namespace

double utilization(const gateway::Gateway& gw) {
  uint64_t quota = gw.cache_pool_quota_bytes();
  if (quota == 0) fail(Errc::ValidationError, "cache pool quota must be positive");
  return double(gw.tier_logical_bytes(gateway::Tier::S3Cache)) / double(quota);
}

SweepReport sweep(gateway::Gateway& gw, int64_t now, const SweepConfig& config,
                  const std::string& actor) {
  auto guard = gw.exclusive_access();

  SweepReport report;
  report.utilization_before = utilization(gw);

  auto expire = [&](const Candidate& c) {
    gw.expire_object(actor, gateway::Tier::S3Cache, c.bucket, c.key, now);
    report.deleted.push_back({c.bucket, c.key, c.created_ts, c.size});
    report.bytes_freed += c.size;
  };

  // Phase 1: contractual expiration against each bucket's own policy.
  double start_threshold = config.default_expiration_days;
  for (const auto& bucket : gw.buckets_in_tier(gateway::Tier::S3Cache))
    if (bucket.lifecycle)
      start_threshold = std::max(start_threshold, bucket.lifecycle->expiration_days);
  report.threshold_start_days = start_threshold;

  for (const Candidate& c : cache_objects(gw, config.default_expiration_days))
    if (age_days(now, c.created_ts) > c.policy_days) expire(c);

  // Phase 2: shrink the tier-global threshold until utilization recovers.
  double threshold = start_threshold;
  while (utilization(gw) > config.high_utilization && threshold > config.floor_days) {
    threshold = std::max(threshold * config.reduction_factor, config.floor_days);
    for (const Candidate& c : cache_objects(gw, config.default_expiration_days)) {
      if (utilization(gw) <= config.high_utilization) break;
      if (age_days(now, c.created_ts) > threshold) expire(c);
    }
  }

  // Phase 3: FIFO fallback at the floor.
  if (utilization(gw) > config.high_utilization) {
    for (const Candidate& c : cache_objects(gw, config.default_expiration_days)) {
      if (utilization(gw) <= config.high_utilization) break;
      expire(c);
    }
  }

  report.threshold_final_days = threshold;
  report.utilization_after = utilization(gw);
  std::stable_sort(report.deleted.begin(), report.deleted.end(),
                   [](const DeletedObject& a, const DeletedObject& b) {
                     return a.created_ts < b.created_ts;
                   });
  return report;
}

std::string SweepReport::to_table() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "deleted_objects: " << deleted.size() << "\n"
     << "bytes_freed: " << bytes_freed << "\n"
     << "threshold_days: " << threshold_start_days << " -> " << threshold_final_days << "\n"
     << "utilization: " << utilization_before << " -> " << utilization_after << "\n";
  return os.str();
}

std::string SweepReport::to_machine_lines() const {
  std::ostringstream os;
  for (const DeletedObject& d : deleted)
    os << d.bucket << '\t' << d.key << '\t' << d.created_ts << '\t' << d.size << '\n';
  return os.str();
}

}  // namespace wg::lifecycle
