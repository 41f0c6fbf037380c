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
#include <memory>
#include <string>
#include <vector>

#include "wg/audit.hpp"
#include "wg/controlplane.hpp"
#include "wg/gateway.hpp"
#include "wg/netpolicy.hpp"
#include "wg/poolstore.hpp"
#include "wg/rng.hpp"

namespace wg {

inline constexpr uint64_t kGiB = 1ull << 30;

struct ClusterLayout {
  unsigned compute_nodes = 20;
  unsigned threads_per_node = 56;  // two 14-core sockets, hyper-threaded
  unsigned ram_gb_per_node = 256;
  unsigned osds = 8;
  uint64_t osd_capacity_bytes = 600 * kGiB;
  // Desk-scale pool partition, roughly 1/1000 of the production figures.
  uint64_t block_quota_bytes = 200 * kGiB;
  uint64_t cache_quota_bytes = 500 * kGiB;
  uint64_t secure_quota_bytes = 400 * kGiB;
  uint64_t general_quota_bytes = 100 * kGiB;
  std::vector<std::string> campus_cidrs = {"192.168.0.0/16"};
  std::vector<std::string> bastion_addrs = {"192.168.0.2"};
};

/// Everything one deployment owns: storage cluster, gateway, tenancy,
/// network policy, and the audit trail. The CLI adds persistence on top.
class Simulation {
 public:
  explicit Simulation(uint64_t seed = 0);

  /// Builds OSDs, the four pools, compute nodes, and network scopes.
  void init_cluster(const ClusterLayout& layout);

  /// Auto-assigned /24 per project, used for the firewall's project scope.
  netpolicy::Cidr assign_project_subnet(const std::string& project);

  bool project_is_dbgap(const std::string& project) const;

  uint64_t rng_seed() const { return rng_seed_; }

  audit::Log audit;
  poolstore::Cluster cluster;
  ctl::ControlPlane control;
  gateway::Gateway gateway;
  netpolicy::ScopeConfig scope_config;
  std::vector<netpolicy::SecurityGroupRule> rules;
  DeterministicRng rng;

 private:
  friend struct StateIo;
  uint64_t rng_seed_ = 0;
  uint32_t next_subnet_ = 0;
};

}  // namespace wg
