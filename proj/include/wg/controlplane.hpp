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
#include <set>
#include <string>
#include <vector>

#include "wg/audit.hpp"

namespace wg {
struct StateIo;
}

namespace wg::ctl {

inline constexpr uint64_t kBytesPerTb = 1024ull * 1024 * 1024 * 1024;

/// Base bundle: 16 vCPUs, 32 GB RAM, 2 TB of volume storage. Add-ons come
/// in whole 1 vCPU / 1 TB increments.
struct Subscription {
  unsigned base_vcpus = 16;
  unsigned base_ram_gb = 32;
  unsigned base_volume_tb = 2;
  unsigned addon_vcpus = 0;
  unsigned addon_volume_tb = 0;
  bool dbgap_approved = false;

  unsigned vcpu_quota() const { return base_vcpus + addon_vcpus; }
  unsigned ram_quota_gb() const { return base_ram_gb; }
  uint64_t volume_quota_bytes() const {
    return uint64_t(base_volume_tb + addon_volume_tb) * kBytesPerTb;
  }
};

struct Usage {
  unsigned vcpus = 0;
  unsigned ram_gb = 0;
  uint64_t volume_bytes = 0;
};

struct Project {
  std::string id;
  Subscription subscription;
  Usage usage;
  std::set<std::string> members;
};

enum class VolumeKind { Volume, Snapshot };
const char* volume_kind_name(VolumeKind kind) noexcept;

struct Volume {
  std::string id;
  std::string project;
  uint64_t logical_bytes = 0;
  VolumeKind kind = VolumeKind::Volume;
  std::string source_image;  // set on CoW clones
};

struct Vm {
  std::string id;
  std::string project;
  unsigned vcpus = 0;
  unsigned ram_gb = 0;
  std::string boot_volume;
  uint32_t host = 0;
};

/// vCPUs oversubscribed 2x against hardware threads; RAM sold 1:1.
struct ComputeNode {
  uint32_t id = 0;
  unsigned hw_threads = 0;
  unsigned ram_gb = 0;
  bool maintenance = false;
  std::set<std::string> resident;
  unsigned vcpus_used = 0;
  unsigned ram_used_gb = 0;

  unsigned vcpu_capacity() const { return hw_threads * 2; }
  unsigned ram_capacity_gb() const { return ram_gb; }
};

/// Image names follow `<Distro><Version>("_" tag)+`, e.g.
/// "Centos7_dbgap_blessed_desktop".
struct ImageName {
  std::string distro;
  std::string version;
  std::vector<std::string> tags;

  std::string canonical() const;
  bool operator==(const ImageName&) const = default;
};
ImageName parse_image_name(std::string_view text);

struct MigrationStep {
  std::string vm;
  uint32_t from = 0;
  uint32_t to = 0;
};

struct DrainReport {
  uint32_t node = 0;
  std::vector<MigrationStep> moves;
  std::string to_table() const;
};

/// Annual cost recovery pricing. unit_price = cost / (recovery * capacity);
/// selling exactly `recovery` of every class returns the configured cost.
struct CostClass {
  double annual_cost = 0.0;
  double capacity_units = 0.0;
};
struct CostModel {
  std::map<std::string, CostClass> classes;
  double recovery_utilization = 0.85;
};
using Bundle = std::map<std::string, double>;  // class -> units

double unit_price(const CostModel& model, const std::string& cls);
double price_bundle(const CostModel& model, const Bundle& bundle);
double revenue_at_recovery(const CostModel& model);
double total_annual_cost(const CostModel& model);
/// Documented example configuration: 2,240 oversubscribed vCPUs at
/// $100,000/yr, 200 volume TB at $10,000/yr, 500 secure-object TB at
/// $20,000/yr.
CostModel example_cost_model();
Bundle base_bundle();

class ControlPlane {
 public:
  explicit ControlPlane(audit::Log& log);

  uint32_t add_node(unsigned hw_threads, unsigned ram_gb);

  Project& create_project(const std::string& actor, const std::string& id, Subscription sub,
                          int64_t now);
  void add_quota_addons(const std::string& actor, const std::string& project,
                        unsigned addon_vcpus, unsigned addon_volume_tb, int64_t now);

  Volume& create_volume(const std::string& actor, const std::string& project, uint64_t bytes,
                        const std::string& source_image, int64_t now);
  Volume& snapshot_volume(const std::string& actor, const std::string& project,
                          const std::string& volume_id, int64_t now);
  void delete_volume(const std::string& actor, const std::string& volume_id, int64_t now);

  Vm& launch_vm(const std::string& actor, const std::string& project, unsigned vcpus,
                unsigned ram_gb, const std::string& boot_volume, int64_t now);
  void terminate_vm(const std::string& actor, const std::string& vm_id, int64_t now);

  /// Atomic: all resident VMs re-placed and the node marked maintenance,
  /// or nothing changes.
  DrainReport drain_node(const std::string& actor, uint32_t node_id, int64_t now);
  void undrain_node(const std::string& actor, uint32_t node_id, int64_t now);

  bool has_project(const std::string& id) const;
  Project project_info(const std::string& id) const;
  Vm vm_info(const std::string& id) const;
  Volume volume_info(const std::string& id) const;
  ComputeNode node_info(uint32_t id) const;
  std::vector<Project> projects() const;
  std::vector<Vm> vms() const;
  std::vector<Volume> volumes() const;
  std::vector<ComputeNode> nodes() const;

  unsigned total_vcpu_capacity() const;
  /// Recomputes usage sums from first principles; throws on drift.
  void check_consistency() const;

 private:
  friend struct wg::StateIo;

  Project& project_locked(const std::string& id);
  ComputeNode& node_locked(uint32_t id);
  /// First-fit by ascending node id; nullopt when nothing fits.
  std::optional<uint32_t> first_fit_locked(unsigned vcpus, unsigned ram_gb,
                                           std::optional<uint32_t> exclude) const;

  audit::Log& audit_;
  mutable std::mutex mu_;
  std::map<std::string, Project> projects_;
  std::map<uint32_t, ComputeNode> nodes_;
  std::map<std::string, Vm> vms_;
  std::map<std::string, Volume> volumes_;
  uint32_t next_node_id_ = 0;
  uint64_t next_volume_seq_ = 1;
  uint64_t next_vm_seq_ = 1;
};

}  // namespace wg::ctl
