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

#include "wg/sim.hpp"

#include "wg/errors.hpp"

namespace wg {

Simulation::Simulation(uint64_t seed)
    : control(audit),
      gateway(
          cluster, audit, [this](const std::string& p) { return project_is_dbgap(p); }, rng),
      rng_seed_(seed) {
  rng.seed = seed;
}

void Simulation::init_cluster(const ClusterLayout& layout) {
  for (unsigned i = 0; i < layout.osds; ++i) cluster.add_osd(layout.osd_capacity_bytes);
  using poolstore::PoolRole;
  using poolstore::Redundancy;
  cluster.create_pool({"block", Redundancy::replicated(3), layout.block_quota_bytes,
                       PoolRole::Block});
  cluster.create_pool({"s3cache", Redundancy::erasure_coded(4, 2), layout.cache_quota_bytes,
                       PoolRole::S3Cache});
  cluster.create_pool({"s3secure", Redundancy::erasure_coded(4, 2), layout.secure_quota_bytes,
                       PoolRole::S3Secure});
  cluster.create_pool({"s3general", Redundancy::erasure_coded(4, 2), layout.general_quota_bytes,
                       PoolRole::S3General});
  for (unsigned i = 0; i < layout.compute_nodes; ++i)
    control.add_node(layout.threads_per_node, layout.ram_gb_per_node);
  for (const std::string& cidr : layout.campus_cidrs)
    scope_config.campus_cidrs.push_back(netpolicy::Cidr::parse(cidr));
  for (const std::string& addr : layout.bastion_addrs)
    scope_config.bastion_addrs.insert(netpolicy::Ipv4::parse(addr).value);
}

netpolicy::Cidr Simulation::assign_project_subnet(const std::string& project) {
  auto existing = scope_config.project_subnets.find(project);
  if (existing != scope_config.project_subnets.end()) return existing->second;
  if (next_subnet_ > 255 * 255)
    fail(Errc::CapacityExhausted, "project subnet space exhausted");
  uint32_t index = next_subnet_++;
  // 10.x.y.0/24 carved sequentially.
  uint32_t base = (10u << 24) | (((index >> 8) & 0xff) << 16) | ((index & 0xff) << 8);
  netpolicy::Cidr cidr;
  cidr.base = base;
  cidr.prefix_len = 24;
  scope_config.project_subnets.emplace(project, cidr);
  return cidr;
}

bool Simulation::project_is_dbgap(const std::string& project) const {
  if (!control.has_project(project)) return false;
  return control.project_info(project).subscription.dbgap_approved;
}

}  // namespace wg
