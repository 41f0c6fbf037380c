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

#include "wg/controlplane.hpp"

#include <algorithm>
#include <sstream>

#include "wg/errors.hpp"

namespace wg::ctl {

const char* volume_kind_name(VolumeKind kind) noexcept {
  return kind == VolumeKind::Volume ? "volume" : "snapshot";
}

std::string ImageName::canonical() const {
  std::string out = distro + version;
  for (const auto& tag : tags) {
    out += '_';
    out += tag;
  }
  return out;
}

ImageName parse_image_name(std::string_view text) {
  if (text.empty()) fail(Errc::MalformedName, "empty image name");
  size_t i = 0;
  while (i < text.size() && ((text[i] >= 'A' && text[i] <= 'Z') || (text[i] >= 'a' && text[i] <= 'z')))
    ++i;
  if (i == 0) fail(Errc::MalformedName, "image name must start with a distro token");
  ImageName name;
  name.distro = std::string(text.substr(0, i));

  size_t v = i;
  bool last_was_digit = false;
  while (v < text.size()) {
    char c = text[v];
    if (c >= '0' && c <= '9') {
      last_was_digit = true;
      ++v;
    } else if (c == '.' && last_was_digit && v + 1 < text.size() && text[v + 1] >= '0' &&
               text[v + 1] <= '9') {
      last_was_digit = false;
      ++v;
    } else {
      break;
    }
  }
  if (v == i) fail(Errc::MalformedName, "missing version: " + std::string(text));
  name.version = std::string(text.substr(i, v - i));

  if (v >= text.size() || text[v] != '_')
    fail(Errc::MalformedName, "at least one tag required: " + std::string(text));
  size_t pos = v;
  while (pos < text.size()) {
    if (text[pos] != '_') fail(Errc::MalformedName, std::string(text));
    size_t start = ++pos;
    while (pos < text.size() && text[pos] != '_') {
      char c = text[pos];
      bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
      if (!ok) fail(Errc::MalformedName, "bad tag character in " + std::string(text));
      ++pos;
    }
    if (pos == start) fail(Errc::MalformedName, "empty tag in " + std::string(text));
    name.tags.emplace_back(text.substr(start, pos - start));
  }
  return name;
}

std::string DrainReport::to_table() const {
  std::ostringstream os;
  os << "vm\tfrom\tto\n";
  for (const MigrationStep& step : moves)
    os << step.vm << '\t' << step.from << '\t' << step.to << '\n';
  os << "total\t" << moves.size() << " migrations\n";
  return os.str();
}

double unit_price(const CostModel& model, const std::string& cls) {
  auto it = model.classes.find(cls);
  if (it == model.classes.end()) fail(Errc::UnknownResource, "no such cost class: " + cls);
  if (it->second.capacity_units <= 0.0) fail(Errc::ZeroCapacity, cls);
  return it->second.annual_cost / (model.recovery_utilization * it->second.capacity_units);
}

double price_bundle(const CostModel& model, const Bundle& bundle) {
  double total = 0.0;
  for (const auto& [cls, units] : bundle) total += units * unit_price(model, cls);
  return total;
}

double revenue_at_recovery(const CostModel& model) {
  double revenue = 0.0;
  for (const auto& [cls, cc] : model.classes)
    revenue += unit_price(model, cls) * model.recovery_utilization * cc.capacity_units;
  return revenue;
}

double total_annual_cost(const CostModel& model) {
  double total = 0.0;
  for (const auto& [cls, cc] : model.classes) {
    (void)cls;
    total += cc.annual_cost;
  }
  return total;
}

CostModel example_cost_model() {
  CostModel model;
  model.classes["vcpu"] = {100000.0, 2240.0};
  model.classes["volume_tb"] = {10000.0, 200.0};
  model.classes["secure_tb"] = {20000.0, 500.0};
  return model;
}

Bundle base_bundle() { return {{"vcpu", 16.0}, {"volume_tb", 2.0}}; }

ControlPlane::ControlPlane(audit::Log& log) : audit_(log) {}

uint32_t ControlPlane::add_node(unsigned hw_threads, unsigned ram_gb) {
  std::lock_guard lock(mu_);
  ComputeNode node;
  node.id = next_node_id_++;
  node.hw_threads = hw_threads;
  node.ram_gb = ram_gb;
  uint32_t id = node.id;
  nodes_.emplace(id, std::move(node));
  return id;
}

Project& ControlPlane::project_locked(const std::string& id) {
  auto it = projects_.find(id);
  if (it == projects_.end()) fail(Errc::UnknownResource, "no such project: " + id);
  return it->second;
}

ComputeNode& ControlPlane::node_locked(uint32_t id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) fail(Errc::UnknownResource, "no such node: " + std::to_string(id));
  return it->second;
}

Project& ControlPlane::create_project(const std::string& actor, const std::string& id,
                                      Subscription sub, int64_t now) {
  std::lock_guard lock(mu_);
  if (id.empty()) fail(Errc::InvalidName, "project id must be non-empty");
  if (projects_.count(id)) fail(Errc::NameTaken, id);
  Project project;
  project.id = id;
  project.subscription = sub;
  auto [it, inserted] = projects_.emplace(id, std::move(project));
  (void)inserted;
  audit_.append(now, actor, "create-project", "project/" + id, audit::Outcome::Ok);
  return it->second;
}

void ControlPlane::add_quota_addons(const std::string& actor, const std::string& project_id,
                                    unsigned addon_vcpus, unsigned addon_volume_tb, int64_t now) {
  std::lock_guard lock(mu_);
  Project& project = project_locked(project_id);
  project.subscription.addon_vcpus += addon_vcpus;
  project.subscription.addon_volume_tb += addon_volume_tb;
  audit_.append(now, actor, "quota-change", "project/" + project_id, audit::Outcome::Ok);
}

Volume& ControlPlane::create_volume(const std::string& actor, const std::string& project_id,
                                    uint64_t bytes, const std::string& source_image,
                                    int64_t now) {
  std::lock_guard lock(mu_);
  Project& project = project_locked(project_id);
  if (bytes == 0) fail(Errc::ValidationError, "volume size must be positive");
  if (!source_image.empty()) parse_image_name(source_image);  // clone source must be well formed
  if (project.usage.volume_bytes + bytes > project.subscription.volume_quota_bytes())
    fail(Errc::VolumeQuotaExceeded, project_id);
  Volume volume;
  volume.id = "vol-" + std::to_string(next_volume_seq_++);
  volume.project = project_id;
  volume.logical_bytes = bytes;
  volume.kind = VolumeKind::Volume;
  volume.source_image = source_image;
  project.usage.volume_bytes += bytes;
  auto [it, inserted] = volumes_.emplace(volume.id, std::move(volume));
  (void)inserted;
  audit_.append(now, actor, "create-volume", "volume/" + it->second.id, audit::Outcome::Ok);
  return it->second;
}

Volume& ControlPlane::snapshot_volume(const std::string& actor, const std::string& project_id,
                                      const std::string& volume_id, int64_t now) {
  std::lock_guard lock(mu_);
  Project& project = project_locked(project_id);
  auto source_it = volumes_.find(volume_id);
  if (source_it == volumes_.end()) fail(Errc::UnknownResource, "no such volume: " + volume_id);
  const Volume& source = source_it->second;
  if (source.project != project_id)
    fail(Errc::ValidationError, "volume belongs to another project");
  // Snapshots are charged at full logical size.
  if (project.usage.volume_bytes + source.logical_bytes >
      project.subscription.volume_quota_bytes())
    fail(Errc::VolumeQuotaExceeded, project_id);
  Volume snapshot;
  snapshot.id = "snap-" + std::to_string(next_volume_seq_++);
  snapshot.project = project_id;
  snapshot.logical_bytes = source.logical_bytes;
  snapshot.kind = VolumeKind::Snapshot;
  project.usage.volume_bytes += snapshot.logical_bytes;
  auto [it, inserted] = volumes_.emplace(snapshot.id, std::move(snapshot));
  (void)inserted;
  audit_.append(now, actor, "snapshot-volume", "volume/" + it->second.id, audit::Outcome::Ok);
  return it->second;
}

void ControlPlane::delete_volume(const std::string& actor, const std::string& volume_id,
                                 int64_t now) {
  std::lock_guard lock(mu_);
  auto it = volumes_.find(volume_id);
  if (it == volumes_.end()) fail(Errc::UnknownResource, "no such volume: " + volume_id);
  for (const auto& [vm_id, vm] : vms_)
    if (vm.boot_volume == volume_id)
      fail(Errc::VolumeInUse, volume_id + " boots " + vm_id);
  Project& project = project_locked(it->second.project);
  project.usage.volume_bytes -= it->second.logical_bytes;
  volumes_.erase(it);
  audit_.append(now, actor, "delete-volume", "volume/" + volume_id, audit::Outcome::Ok);
}

std::optional<uint32_t> ControlPlane::first_fit_locked(unsigned vcpus, unsigned ram_gb,
                                                       std::optional<uint32_t> exclude) const {
  for (const auto& [id, node] : nodes_) {
    if (node.maintenance) continue;
    if (exclude && *exclude == id) continue;
    if (node.vcpus_used + vcpus <= node.vcpu_capacity() &&
        node.ram_used_gb + ram_gb <= node.ram_capacity_gb())
      return id;
  }
  return std::nullopt;
}

Vm& ControlPlane::launch_vm(const std::string& actor, const std::string& project_id,
                            unsigned vcpus, unsigned ram_gb, const std::string& boot_volume,
                            int64_t now) {
  std::lock_guard lock(mu_);
  Project& project = project_locked(project_id);
  if (vcpus == 0 || ram_gb == 0) fail(Errc::ValidationError, "vcpus and ram must be positive");
  if (project.usage.vcpus + vcpus > project.subscription.vcpu_quota() ||
      project.usage.ram_gb + ram_gb > project.subscription.ram_quota_gb())
    fail(Errc::ProjectQuotaExceeded, project_id);
  if (!boot_volume.empty()) {
    auto vol_it = volumes_.find(boot_volume);
    if (vol_it == volumes_.end()) fail(Errc::UnknownResource, "no such volume: " + boot_volume);
    if (vol_it->second.project != project_id)
      fail(Errc::ValidationError, "boot volume belongs to another project");
    if (vol_it->second.kind != VolumeKind::Volume)
      fail(Errc::ValidationError, "snapshots cannot boot directly");
  }
  auto host = first_fit_locked(vcpus, ram_gb, std::nullopt);
  if (!host) fail(Errc::CapacityExhausted, "no node fits the requested vm");

  Vm vm;
  vm.id = "vm-" + std::to_string(next_vm_seq_++);
  vm.project = project_id;
  vm.vcpus = vcpus;
  vm.ram_gb = ram_gb;
  vm.boot_volume = boot_volume;
  vm.host = *host;
  ComputeNode& node = node_locked(*host);
  node.resident.insert(vm.id);
  node.vcpus_used += vcpus;
  node.ram_used_gb += ram_gb;
  project.usage.vcpus += vcpus;
  project.usage.ram_gb += ram_gb;
  auto [it, inserted] = vms_.emplace(vm.id, std::move(vm));
  (void)inserted;
  audit_.append(now, actor, "launch-vm", "vm/" + it->second.id, audit::Outcome::Ok);
  return it->second;
}

void ControlPlane::terminate_vm(const std::string& actor, const std::string& vm_id, int64_t now) {
  std::lock_guard lock(mu_);
  auto it = vms_.find(vm_id);
  if (it == vms_.end()) fail(Errc::UnknownResource, "no such vm: " + vm_id);
  Vm& vm = it->second;
  ComputeNode& node = node_locked(vm.host);
  node.resident.erase(vm.id);
  node.vcpus_used -= vm.vcpus;
  node.ram_used_gb -= vm.ram_gb;
  Project& project = project_locked(vm.project);
  project.usage.vcpus -= vm.vcpus;
  project.usage.ram_gb -= vm.ram_gb;
  vms_.erase(it);
  audit_.append(now, actor, "terminate-vm", "vm/" + vm_id, audit::Outcome::Ok);
}

DrainReport ControlPlane::drain_node(const std::string& actor, uint32_t node_id, int64_t now) {
  std::lock_guard lock(mu_);
  ComputeNode& node = node_locked(node_id);

  // Plan first against shadow usage; commit only a complete plan.
  std::vector<std::string> vm_ids(node.resident.begin(), node.resident.end());
  std::sort(vm_ids.begin(), vm_ids.end());
  std::map<uint32_t, std::pair<unsigned, unsigned>> planned;  // node -> extra (vcpus, ram)
  DrainReport report;
  report.node = node_id;
  for (const std::string& vm_id : vm_ids) {
    const Vm& vm = vms_.at(vm_id);
    std::optional<uint32_t> target;
    for (const auto& [cand_id, cand] : nodes_) {
      if (cand_id == node_id || cand.maintenance) continue;
      auto extra = planned.count(cand_id) ? planned[cand_id] : std::pair<unsigned, unsigned>{0, 0};
      if (cand.vcpus_used + extra.first + vm.vcpus <= cand.vcpu_capacity() &&
          cand.ram_used_gb + extra.second + vm.ram_gb <= cand.ram_capacity_gb()) {
        target = cand_id;
        break;
      }
    }
    if (!target) fail(Errc::InsufficientClusterHeadroom, "drain would strand " + vm_id);
    auto& extra = planned[*target];
    extra.first += vm.vcpus;
    extra.second += vm.ram_gb;
    report.moves.push_back({vm_id, node_id, *target});
  }

  for (const MigrationStep& step : report.moves) {
    Vm& vm = vms_.at(step.vm);
    ComputeNode& to = node_locked(step.to);
    node.resident.erase(vm.id);
    node.vcpus_used -= vm.vcpus;
    node.ram_used_gb -= vm.ram_gb;
    to.resident.insert(vm.id);
    to.vcpus_used += vm.vcpus;
    to.ram_used_gb += vm.ram_gb;
    vm.host = step.to;
  }
  node.maintenance = true;
  audit_.append(now, actor, "drain-node", "node/" + std::to_string(node_id), audit::Outcome::Ok);
  return report;
}

void ControlPlane::undrain_node(const std::string& actor, uint32_t node_id, int64_t now) {
  std::lock_guard lock(mu_);
  ComputeNode& node = node_locked(node_id);
  node.maintenance = false;  // resident VMs do not move back
  audit_.append(now, actor, "undrain-node", "node/" + std::to_string(node_id),
                audit::Outcome::Ok);
}

bool ControlPlane::has_project(const std::string& id) const {
  std::lock_guard lock(mu_);
  return projects_.count(id) > 0;
}

Project ControlPlane::project_info(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = projects_.find(id);
  if (it == projects_.end()) fail(Errc::UnknownResource, "no such project: " + id);
  return it->second;
}

Vm ControlPlane::vm_info(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = vms_.find(id);
  if (it == vms_.end()) fail(Errc::UnknownResource, "no such vm: " + id);
  return it->second;
}

Volume ControlPlane::volume_info(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = volumes_.find(id);
  if (it == volumes_.end()) fail(Errc::UnknownResource, "no such volume: " + id);
  return it->second;
}

ComputeNode ControlPlane::node_info(uint32_t id) const {
  std::lock_guard lock(mu_);
  auto it = nodes_.find(id);
  if (it == nodes_.end()) fail(Errc::UnknownResource, "no such node: " + std::to_string(id));
  return it->second;
}

std::vector<Project> ControlPlane::projects() const {
  std::lock_guard lock(mu_);
  std::vector<Project> out;
  for (const auto& [id, p] : projects_) {
    (void)id;
    out.push_back(p);
  }
  return out;
}

std::vector<Vm> ControlPlane::vms() const {
  std::lock_guard lock(mu_);
  std::vector<Vm> out;
  for (const auto& [id, vm] : vms_) {
    (void)id;
    out.push_back(vm);
  }
  return out;
}

std::vector<Volume> ControlPlane::volumes() const {
  std::lock_guard lock(mu_);
  std::vector<Volume> out;
  for (const auto& [id, v] : volumes_) {
    (void)id;
    out.push_back(v);
  }
  return out;
}

std::vector<ComputeNode> ControlPlane::nodes() const {
  std::lock_guard lock(mu_);
  std::vector<ComputeNode> out;
  for (const auto& [id, n] : nodes_) {
    (void)id;
    out.push_back(n);
  }
  return out;
}

unsigned ControlPlane::total_vcpu_capacity() const {
  std::lock_guard lock(mu_);
  unsigned total = 0;
  for (const auto& [id, node] : nodes_) {
    (void)id;
    total += node.vcpu_capacity();
  }
  return total;
}

void ControlPlane::check_consistency() const {
  std::lock_guard lock(mu_);
  std::map<std::string, Usage> recomputed;
  std::map<uint32_t, std::pair<unsigned, unsigned>> node_load;
  for (const auto& [id, vm] : vms_) {
    (void)id;
    recomputed[vm.project].vcpus += vm.vcpus;
    recomputed[vm.project].ram_gb += vm.ram_gb;
    auto& load = node_load[vm.host];
    load.first += vm.vcpus;
    load.second += vm.ram_gb;
  }
  for (const auto& [id, vol] : volumes_) {
    (void)id;
    recomputed[vol.project].volume_bytes += vol.logical_bytes;
  }
  for (const auto& [id, project] : projects_) {
    const Usage& r = recomputed[id];
    if (r.vcpus != project.usage.vcpus || r.ram_gb != project.usage.ram_gb ||
        r.volume_bytes != project.usage.volume_bytes)
      fail(Errc::ValidationError, "project usage drifted: " + id);
    if (project.usage.vcpus > project.subscription.vcpu_quota() ||
        project.usage.ram_gb > project.subscription.ram_quota_gb() ||
        project.usage.volume_bytes > project.subscription.volume_quota_bytes())
      fail(Errc::ValidationError, "project over quota: " + id);
  }
  for (const auto& [id, node] : nodes_) {
    auto load = node_load.count(id) ? node_load.at(id) : std::pair<unsigned, unsigned>{0, 0};
    if (load.first != node.vcpus_used || load.second != node.ram_used_gb)
      fail(Errc::ValidationError, "node usage drifted: " + std::to_string(id));
    if (node.vcpus_used > node.vcpu_capacity() || node.ram_used_gb > node.ram_capacity_gb())
      fail(Errc::ValidationError, "node over capacity: " + std::to_string(id));
  }
}

}  // namespace wg::ctl
