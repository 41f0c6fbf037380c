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

#include "wg/state.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wg/digest.hpp"
#include "wg/errors.hpp"

namespace wg {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::UnknownResource, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::ValidationError, "cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) fail(Errc::ValidationError, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string bytes_to_hex(const std::vector<uint8_t>& bytes) {
  return hex_encode(std::span<const uint8_t>(bytes.data(), bytes.size()));
}

std::vector<uint8_t> hex_to_bytes(const std::string& text) {
  std::vector<uint8_t> out;
  if (!hex_decode(text, out)) fail(Errc::ValidationError, "bad hex payload in state file");
  return out;
}

}  // namespace

/// Persistence backdoor; the one component allowed to touch private state.
struct StateIo {
  static ordered_json dump(const Simulation& sim) {
    ordered_json j;
    j["version"] = state::kVersion;
    j["rng_seed"] = sim.rng_seed_;
    j["rng_counter"] = sim.rng.counter;
    j["next_subnet"] = sim.next_subnet_;

    ordered_json osds = ordered_json::array();
    for (const auto& [id, osd] : sim.cluster.osds_) {
      (void)id;
      ordered_json o;
      o["id"] = osd.id;
      o["capacity_bytes"] = osd.capacity_bytes;
      o["up"] = osd.up;
      o["encrypted_at_rest"] = osd.encrypted_at_rest;
      ordered_json shards = ordered_json::object();
      for (const auto& [key, bytes] : osd.shards) shards[key] = bytes_to_hex(bytes);
      o["shards"] = std::move(shards);
      osds.push_back(std::move(o));
    }
    j["next_osd_id"] = sim.cluster.next_osd_id_;
    j["osds"] = std::move(osds);

    ordered_json pools = ordered_json::array();
    for (const auto& [name, pool] : sim.cluster.pools_) {
      (void)name;
      ordered_json p;
      p["name"] = pool.spec_.name;
      p["redundancy"] = pool.spec_.redundancy.to_string();
      p["quota_bytes"] = pool.spec_.quota_bytes;
      p["role"] = poolstore::pool_role_name(pool.spec_.role);
      p["logical_usage"] = pool.logical_usage_;
      ordered_json objects = ordered_json::array();
      for (const auto& [object_id, stripe] : pool.objects_) {
        (void)object_id;
        ordered_json s;
        s["object_id"] = stripe.object_id;
        s["shard_size"] = stripe.shard_size;
        s["logical_size"] = stripe.logical_size;
        ordered_json locations = ordered_json::array();
        for (const auto& loc : stripe.locations)
          locations.push_back(ordered_json::array({loc.osd_id, loc.shard_index}));
        s["locations"] = std::move(locations);
        objects.push_back(std::move(s));
      }
      p["objects"] = std::move(objects);
      pools.push_back(std::move(p));
    }
    j["pools"] = std::move(pools);

    ordered_json buckets = ordered_json::array();
    for (const auto& [slot, bucket] : sim.gateway.buckets_) {
      (void)slot;
      ordered_json b;
      b["name"] = bucket.name;
      b["tier"] = gateway::tier_name(bucket.tier);
      b["owner"] = bucket.owner;
      b["quota_bytes"] = bucket.quota_bytes;
      if (bucket.lifecycle)
        b["lifecycle_days"] = bucket.lifecycle->expiration_days;
      else
        b["lifecycle_days"] = nullptr;
      b["created_ts"] = bucket.created_ts;
      b["usage_bytes"] = bucket.usage_bytes;
      ordered_json objects = ordered_json::array();
      for (const auto& [key, meta] : bucket.objects) {
        (void)key;
        ordered_json m;
        m["key"] = meta.key;
        m["size"] = meta.size;
        m["created_ts"] = meta.created_ts;
        m["content_hash"] = meta.content_hash;
        m["sse_fingerprint"] = meta.sse_fingerprint;
        m["sse_nonce"] =
            hex_encode(std::span<const uint8_t>(meta.sse_nonce.data(), meta.sse_nonce.size()));
        objects.push_back(std::move(m));
      }
      b["objects"] = std::move(objects);
      buckets.push_back(std::move(b));
    }
    j["buckets"] = std::move(buckets);

    ordered_json projects = ordered_json::array();
    for (const auto& [id, project] : sim.control.projects_) {
      (void)id;
      ordered_json p;
      p["id"] = project.id;
      p["base_vcpus"] = project.subscription.base_vcpus;
      p["base_ram_gb"] = project.subscription.base_ram_gb;
      p["base_volume_tb"] = project.subscription.base_volume_tb;
      p["addon_vcpus"] = project.subscription.addon_vcpus;
      p["addon_volume_tb"] = project.subscription.addon_volume_tb;
      p["dbgap_approved"] = project.subscription.dbgap_approved;
      p["usage_vcpus"] = project.usage.vcpus;
      p["usage_ram_gb"] = project.usage.ram_gb;
      p["usage_volume_bytes"] = project.usage.volume_bytes;
      p["members"] = project.members;
      projects.push_back(std::move(p));
    }
    j["projects"] = std::move(projects);

    ordered_json nodes = ordered_json::array();
    for (const auto& [id, node] : sim.control.nodes_) {
      (void)id;
      ordered_json n;
      n["id"] = node.id;
      n["hw_threads"] = node.hw_threads;
      n["ram_gb"] = node.ram_gb;
      n["maintenance"] = node.maintenance;
      n["resident"] = node.resident;
      n["vcpus_used"] = node.vcpus_used;
      n["ram_used_gb"] = node.ram_used_gb;
      nodes.push_back(std::move(n));
    }
    j["next_node_id"] = sim.control.next_node_id_;
    j["nodes"] = std::move(nodes);

    ordered_json vms = ordered_json::array();
    for (const auto& [id, vm] : sim.control.vms_) {
      (void)id;
      ordered_json v;
      v["id"] = vm.id;
      v["project"] = vm.project;
      v["vcpus"] = vm.vcpus;
      v["ram_gb"] = vm.ram_gb;
      v["boot_volume"] = vm.boot_volume;
      v["host"] = vm.host;
      vms.push_back(std::move(v));
    }
    j["next_vm_seq"] = sim.control.next_vm_seq_;
    j["vms"] = std::move(vms);

    ordered_json volumes = ordered_json::array();
    for (const auto& [id, volume] : sim.control.volumes_) {
      (void)id;
      ordered_json v;
      v["id"] = volume.id;
      v["project"] = volume.project;
      v["logical_bytes"] = volume.logical_bytes;
      v["kind"] = ctl::volume_kind_name(volume.kind);
      v["source_image"] = volume.source_image;
      volumes.push_back(std::move(v));
    }
    j["next_volume_seq"] = sim.control.next_volume_seq_;
    j["volumes"] = std::move(volumes);

    ordered_json scope;
    ordered_json campus = ordered_json::array();
    for (const auto& cidr : sim.scope_config.campus_cidrs) campus.push_back(cidr.to_string());
    scope["campus_cidrs"] = std::move(campus);
    ordered_json bastions = ordered_json::array();
    for (uint32_t addr : sim.scope_config.bastion_addrs)
      bastions.push_back(netpolicy::Ipv4{addr}.to_string());
    scope["bastion_addrs"] = std::move(bastions);
    ordered_json subnets = ordered_json::object();
    for (const auto& [project, cidr] : sim.scope_config.project_subnets)
      subnets[project] = cidr.to_string();
    scope["project_subnets"] = std::move(subnets);
    j["scope_config"] = std::move(scope);

    ordered_json rules = ordered_json::array();
    for (const auto& rule : sim.rules) {
      ordered_json r;
      r["project"] = rule.project;
      r["port"] = rule.port;
      r["source_scope"] = netpolicy::rule_scope_name(rule.source_scope);
      r["note"] = rule.note;
      rules.push_back(std::move(r));
    }
    j["rules"] = std::move(rules);

    j["audit_len"] = sim.audit.size();
    return j;
  }

  static std::unique_ptr<Simulation> restore(const ordered_json& j,
                                             const std::string& audit_lines) {
    if (!j.contains("version") || !j["version"].is_number_integer())
      fail(Errc::ValidationError, "state file has no version");
    int version = j["version"].get<int>();
    if (version != state::kVersion)
      fail(Errc::StateVersionUnsupported,
           "state version " + std::to_string(version) + " is not supported (expected " +
               std::to_string(state::kVersion) + ")");

    auto sim = std::make_unique<Simulation>(j["rng_seed"].get<uint64_t>());
    sim->rng.counter = j["rng_counter"].get<uint64_t>();
    sim->next_subnet_ = j["next_subnet"].get<uint32_t>();

    for (const auto& o : j["osds"]) {
      poolstore::OsdNode osd;
      osd.id = o["id"].get<uint32_t>();
      osd.capacity_bytes = o["capacity_bytes"].get<uint64_t>();
      osd.up = o["up"].get<bool>();
      osd.encrypted_at_rest = o["encrypted_at_rest"].get<bool>();
      for (const auto& [key, value] : o["shards"].items())
        osd.shards[key] = hex_to_bytes(value.get<std::string>());
      sim->cluster.osds_.emplace(osd.id, std::move(osd));
    }
    sim->cluster.next_osd_id_ = j["next_osd_id"].get<uint32_t>();

    for (const auto& p : j["pools"]) {
      poolstore::Pool pool;
      pool.spec_.name = p["name"].get<std::string>();
      pool.spec_.redundancy = poolstore::Redundancy::parse(p["redundancy"].get<std::string>());
      pool.spec_.quota_bytes = p["quota_bytes"].get<uint64_t>();
      pool.spec_.role = poolstore::parse_pool_role(p["role"].get<std::string>());
      pool.logical_usage_ = p["logical_usage"].get<uint64_t>();
      for (const auto& s : p["objects"]) {
        poolstore::StripeMap stripe;
        stripe.object_id = s["object_id"].get<std::string>();
        stripe.shard_size = s["shard_size"].get<uint64_t>();
        stripe.logical_size = s["logical_size"].get<uint64_t>();
        stripe.scheme = pool.spec_.redundancy;
        for (const auto& loc : s["locations"])
          stripe.locations.push_back({loc[0].get<uint32_t>(), loc[1].get<uint32_t>()});
        pool.objects_.emplace(stripe.object_id, std::move(stripe));
      }
      sim->cluster.pools_.emplace(pool.spec_.name, std::move(pool));
    }

    for (const auto& b : j["buckets"]) {
      gateway::Bucket bucket;
      bucket.name = b["name"].get<std::string>();
      bucket.tier = gateway::parse_tier(b["tier"].get<std::string>());
      bucket.owner = b["owner"].get<std::string>();
      bucket.quota_bytes = b["quota_bytes"].get<uint64_t>();
      if (!b["lifecycle_days"].is_null())
        bucket.lifecycle = gateway::LifecyclePolicy{b["lifecycle_days"].get<double>()};
      bucket.created_ts = b["created_ts"].get<int64_t>();
      bucket.usage_bytes = b["usage_bytes"].get<uint64_t>();
      for (const auto& m : b["objects"]) {
        gateway::ObjectMeta meta;
        meta.key = m["key"].get<std::string>();
        meta.size = m["size"].get<uint64_t>();
        meta.created_ts = m["created_ts"].get<int64_t>();
        meta.content_hash = m["content_hash"].get<std::string>();
        meta.sse_fingerprint = m["sse_fingerprint"].get<std::string>();
        auto nonce = hex_to_bytes(m["sse_nonce"].get<std::string>());
        if (nonce.size() != meta.sse_nonce.size())
          fail(Errc::ValidationError, "bad nonce length in state file");
        std::copy(nonce.begin(), nonce.end(), meta.sse_nonce.begin());
        bucket.objects.emplace(meta.key, std::move(meta));
      }
      std::string slot =
          std::string(gateway::tier_name(bucket.tier)) + "/" + bucket.name;
      sim->gateway.buckets_.emplace(std::move(slot), std::move(bucket));
    }

    for (const auto& p : j["projects"]) {
      ctl::Project project;
      project.id = p["id"].get<std::string>();
      project.subscription.base_vcpus = p["base_vcpus"].get<unsigned>();
      project.subscription.base_ram_gb = p["base_ram_gb"].get<unsigned>();
      project.subscription.base_volume_tb = p["base_volume_tb"].get<unsigned>();
      project.subscription.addon_vcpus = p["addon_vcpus"].get<unsigned>();
      project.subscription.addon_volume_tb = p["addon_volume_tb"].get<unsigned>();
      project.subscription.dbgap_approved = p["dbgap_approved"].get<bool>();
      project.usage.vcpus = p["usage_vcpus"].get<unsigned>();
      project.usage.ram_gb = p["usage_ram_gb"].get<unsigned>();
      project.usage.volume_bytes = p["usage_volume_bytes"].get<uint64_t>();
      for (const auto& member : p["members"]) project.members.insert(member.get<std::string>());
      sim->control.projects_.emplace(project.id, std::move(project));
    }

    for (const auto& n : j["nodes"]) {
      ctl::ComputeNode node;
      node.id = n["id"].get<uint32_t>();
      node.hw_threads = n["hw_threads"].get<unsigned>();
      node.ram_gb = n["ram_gb"].get<unsigned>();
      node.maintenance = n["maintenance"].get<bool>();
      for (const auto& vm : n["resident"]) node.resident.insert(vm.get<std::string>());
      node.vcpus_used = n["vcpus_used"].get<unsigned>();
      node.ram_used_gb = n["ram_used_gb"].get<unsigned>();
      sim->control.nodes_.emplace(node.id, std::move(node));
    }
    sim->control.next_node_id_ = j["next_node_id"].get<uint32_t>();

    for (const auto& v : j["vms"]) {
      ctl::Vm vm;
      vm.id = v["id"].get<std::string>();
      vm.project = v["project"].get<std::string>();
      vm.vcpus = v["vcpus"].get<unsigned>();
      vm.ram_gb = v["ram_gb"].get<unsigned>();
      vm.boot_volume = v["boot_volume"].get<std::string>();
      vm.host = v["host"].get<uint32_t>();
      sim->control.vms_.emplace(vm.id, std::move(vm));
    }
    sim->control.next_vm_seq_ = j["next_vm_seq"].get<uint64_t>();

    for (const auto& v : j["volumes"]) {
      ctl::Volume volume;
      volume.id = v["id"].get<std::string>();
      volume.project = v["project"].get<std::string>();
      volume.logical_bytes = v["logical_bytes"].get<uint64_t>();
      volume.kind = v["kind"].get<std::string>() == "snapshot" ? ctl::VolumeKind::Snapshot
                                                               : ctl::VolumeKind::Volume;
      volume.source_image = v["source_image"].get<std::string>();
      sim->control.volumes_.emplace(volume.id, std::move(volume));
    }
    sim->control.next_volume_seq_ = j["next_volume_seq"].get<uint64_t>();

    for (const auto& cidr : j["scope_config"]["campus_cidrs"])
      sim->scope_config.campus_cidrs.push_back(netpolicy::Cidr::parse(cidr.get<std::string>()));
    for (const auto& addr : j["scope_config"]["bastion_addrs"])
      sim->scope_config.bastion_addrs.insert(
          netpolicy::Ipv4::parse(addr.get<std::string>()).value);
    for (const auto& [project, cidr] : j["scope_config"]["project_subnets"].items())
      sim->scope_config.project_subnets.emplace(project,
                                                netpolicy::Cidr::parse(cidr.get<std::string>()));

    for (const auto& r : j["rules"]) {
      netpolicy::SecurityGroupRule rule;
      rule.project = r["project"].get<std::string>();
      rule.port = r["port"].get<uint16_t>();
      rule.source_scope = netpolicy::parse_rule_scope(r["source_scope"].get<std::string>());
      rule.note = r["note"].get<std::string>();
      sim->rules.push_back(std::move(rule));
    }

    size_t audit_len = j["audit_len"].get<size_t>();
    audit::Log log = audit::Log::from_lines(audit_lines);
    auto entries = log.entries();
    if (entries.size() < audit_len)
      fail(Errc::ValidationError, "audit file shorter than the state file records");
    entries.resize(audit_len);  // the state file is the authority
    sim->audit.restore(std::move(entries));
    return sim;
  }
};

namespace state {

std::string serialize(const Simulation& sim) { return StateIo::dump(sim).dump(2) + "\n"; }

std::unique_ptr<Simulation> deserialize(const std::string& json_text,
                                        const std::string& audit_lines) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ValidationError, std::string("state file is not valid JSON: ") + e.what());
  }
  try {
    return StateIo::restore(j, audit_lines);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ValidationError, std::string("state file is malformed: ") + e.what());
  }
}

std::filesystem::path audit_path_for(const std::filesystem::path& state_path) {
  std::filesystem::path p = state_path;
  p += ".audit";
  return p;
}

void save(const Simulation& sim, const std::filesystem::path& path) {
  write_text_file_atomic(audit_path_for(path), sim.audit.to_lines());
  write_text_file_atomic(path, serialize(sim));
}

std::unique_ptr<Simulation> load(const std::filesystem::path& path) {
  std::string json_text = read_text_file(path);
  std::string audit_lines;
  if (std::filesystem::exists(audit_path_for(path)))
    audit_lines = read_text_file(audit_path_for(path));
  return deserialize(json_text, audit_lines);
}

}  // namespace state

}  // namespace wg
