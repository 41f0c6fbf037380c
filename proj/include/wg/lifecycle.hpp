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
#include <string>
#include <vector>

#include "wg/gateway.hpp"

namespace wg::lifecycle {

struct DeletedObject {
  std::string bucket;
  std::string key;
  int64_t created_ts = 0;
  uint64_t size = 0;
};

struct SweepReport {
  std::vector<DeletedObject> deleted;  // sorted by created_ts ascending
  uint64_t bytes_freed = 0;
  double threshold_start_days = 0.0;
  double threshold_final_days = 0.0;
  double utilization_before = 0.0;
  double utilization_after = 0.0;

  std::string to_table() const;
  /// One deleted object per line: bucket, key, created_ts, size.
  std::string to_machine_lines() const;
};

struct SweepConfig {
  double default_expiration_days = 60.0;
  double high_utilization = 0.80;
  double reduction_factor = 0.9;
  double floor_days = 1.0;
};

/// Cache-tier logical bytes over the cache pool quota.
double utilization(const gateway::Gateway& gw);

/// FIFO expiry over the cache tier:
///   phase 1  delete objects older than their bucket policy;
///   phase 2  while utilization stays above the mark, shrink a tier-global
///            threshold geometrically and expire past it, oldest first,
///            stopping as soon as utilization drops to the mark;
///   phase 3  at the floor, plain oldest-first deletion down to the mark.
SweepReport sweep(gateway::Gateway& gw, int64_t now, const SweepConfig& config = {},
                  const std::string& actor = "lifecycle");

}  // namespace wg::lifecycle
