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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wg/cli.hpp"
#include "wg/errors.hpp"
#include "wg/lifecycle.hpp"
#include "wg/perfmodel.hpp"
#include "wg/rs.hpp"
#include "wg/sim.hpp"
#include "wg/state.hpp"

#include <sstream>

namespace py = pybind11;
using namespace wg;

namespace {

rs::Block to_block(const py::bytes& data) {
  std::string_view view = data;
  return rs::Block(view.begin(), view.end());
}

py::bytes to_bytes(const std::vector<uint8_t>& data) {
  return py::bytes(reinterpret_cast<const char*>(data.data()), data.size());
}

py::dict stripe_to_dict(const poolstore::StripeMap& stripe) {
  py::dict d;
  d["object_id"] = stripe.object_id;
  d["shard_size"] = stripe.shard_size;
  d["logical_size"] = stripe.logical_size;
  d["scheme"] = stripe.scheme.to_string();
  py::list locations;
  for (const auto& loc : stripe.locations)
    locations.append(py::make_tuple(loc.osd_id, loc.shard_index));
  d["locations"] = locations;
  return d;
}

py::dict meta_to_dict(const gateway::ObjectMeta& meta) {
  py::dict d;
  d["key"] = meta.key;
  d["size"] = meta.size;
  d["created_ts"] = meta.created_ts;
  d["content_hash"] = meta.content_hash;
  d["sse_fingerprint"] = meta.sse_fingerprint;
  return d;
}

}  // namespace

PYBIND11_MODULE(_wgcloud, m) {
  m.doc() = "Desk-scale controlled-access research cloud: erasure-coded "
            "storage, tiered S3 gateway, quota-enforced tenancy, firewall "
            "policy, and audit logging.";

  py::register_exception<Error>(m, "WgError");

  // --- erasure coding
  m.def(
      "rs_encode",
      [](unsigned k, unsigned m_, const std::vector<py::bytes>& data) {
        std::vector<rs::Block> blocks;
        blocks.reserve(data.size());
        for (const auto& d : data) blocks.push_back(to_block(d));
        auto parity = rs::encode(k, m_, blocks);
        py::list out;
        for (const auto& p : parity) out.append(to_bytes(p));
        return out;
      },
      py::arg("k"), py::arg("m"), py::arg("data_blocks"),
      "Systematic Reed-Solomon: k data blocks in, m parity blocks out.");
  m.def(
      "rs_decode",
      [](unsigned k, unsigned m_, const std::map<unsigned, py::bytes>& shards) {
        std::map<unsigned, rs::Block> blocks;
        for (const auto& [idx, b] : shards) blocks[idx] = to_block(b);
        auto data = rs::decode(k, m_, blocks);
        py::list out;
        for (const auto& d : data) out.append(to_bytes(d));
        return out;
      },
      py::arg("k"), py::arg("m"), py::arg("shards"),
      "Rebuild the k data blocks from any k of the k+m indexed shards.");

  // --- performance model
  py::class_<perfmodel::BackendModel>(m, "BackendModel")
      .def(py::init<>())
      .def(py::init([](double bandwidth, double iops, double penalty) {
             return perfmodel::BackendModel{bandwidth, iops, penalty};
           }),
           py::arg("backend_bandwidth_mbps"), py::arg("iops_budget"),
           py::arg("cpu_penalty_ec") = 0.78)
      .def_readwrite("backend_bandwidth_mbps", &perfmodel::BackendModel::backend_bandwidth_mbps)
      .def_readwrite("iops_budget", &perfmodel::BackendModel::iops_budget)
      .def_readwrite("cpu_penalty_ec", &perfmodel::BackendModel::cpu_penalty_ec);

  m.def("backend_bytes", [](double client_mb, const std::string& scheme) {
    return perfmodel::backend_bytes(client_mb, poolstore::Redundancy::parse(scheme));
  }, py::arg("client_mb"), py::arg("scheme"));
  m.def("client_throughput",
        [](const perfmodel::BackendModel& model, const std::string& scheme, double size_mb) {
          return perfmodel::client_throughput(model, poolstore::Redundancy::parse(scheme),
                                              size_mb);
        },
        py::arg("model"), py::arg("scheme"), py::arg("object_size_mb"));
  m.def("default_calibrated_model", &perfmodel::default_calibrated_model);
  m.def("crossover_size",
        [](const perfmodel::BackendModel& model, const std::string& rep, const std::string& ec,
           double lo, double hi) -> py::object {
          auto size = perfmodel::crossover_size(model, poolstore::Redundancy::parse(rep),
                                                poolstore::Redundancy::parse(ec), lo, hi);
          if (!size) return py::none();
          return py::float_(*size);
        },
        py::arg("model"), py::arg("replicated"), py::arg("erasure_coded"), py::arg("lo"),
        py::arg("hi"));
  m.def("hpl_matrix_size",
        [](unsigned threads, double mem_per_thread_bytes, double fill) {
          perfmodel::HplConfig config;
          config.threads = threads;
          config.mem_per_thread_bytes = mem_per_thread_bytes;
          config.fill = fill;
          return perfmodel::hpl_matrix_size(config);
        },
        py::arg("threads"), py::arg("mem_per_thread_bytes") = 2.0 * 1024 * 1024 * 1024,
        py::arg("fill") = 0.8);
  m.def("percent_of_peak", &perfmodel::percent_of_peak, py::arg("measured_gflops"),
        py::arg("cores"), py::arg("peak_gflops_per_core"));
  m.def("virtualization_loss", &perfmodel::virtualization_loss, py::arg("bare_fraction"),
        py::arg("vm_fraction"));

  // --- image names
  m.def("parse_image_name", [](const std::string& text) {
    auto name = ctl::parse_image_name(text);
    return py::make_tuple(name.distro, name.version, name.tags);
  }, py::arg("text"), "Returns (distro, version, tags).");

  // --- the whole simulation
  py::class_<ClusterLayout>(m, "ClusterLayout")
      .def(py::init<>())
      .def_readwrite("compute_nodes", &ClusterLayout::compute_nodes)
      .def_readwrite("threads_per_node", &ClusterLayout::threads_per_node)
      .def_readwrite("ram_gb_per_node", &ClusterLayout::ram_gb_per_node)
      .def_readwrite("osds", &ClusterLayout::osds)
      .def_readwrite("osd_capacity_bytes", &ClusterLayout::osd_capacity_bytes)
      .def_readwrite("block_quota_bytes", &ClusterLayout::block_quota_bytes)
      .def_readwrite("cache_quota_bytes", &ClusterLayout::cache_quota_bytes)
      .def_readwrite("secure_quota_bytes", &ClusterLayout::secure_quota_bytes)
      .def_readwrite("general_quota_bytes", &ClusterLayout::general_quota_bytes);

  py::class_<Simulation>(m, "Simulation")
      .def(py::init<uint64_t>(), py::arg("seed") = 0)
      .def("init_cluster",
           [](Simulation& sim, const ClusterLayout& layout) { sim.init_cluster(layout); },
           py::arg("layout") = ClusterLayout{})
      // tenancy
      .def("create_project",
           [](Simulation& sim, const std::string& id, bool dbgap, unsigned addon_vcpus,
              unsigned addon_volume_tb, int64_t now, const std::string& actor) {
             ctl::Subscription sub;
             sub.dbgap_approved = dbgap;
             sub.addon_vcpus = addon_vcpus;
             sub.addon_volume_tb = addon_volume_tb;
             sim.control.create_project(actor, id, sub, now);
             sim.assign_project_subnet(id);
           },
           py::arg("id"), py::arg("dbgap") = false, py::arg("addon_vcpus") = 0,
           py::arg("addon_volume_tb") = 0, py::arg("now") = 0, py::arg("actor") = "python")
      .def("create_volume",
           [](Simulation& sim, const std::string& project, uint64_t bytes,
              const std::string& source_image, int64_t now, const std::string& actor) {
             return sim.control.create_volume(actor, project, bytes, source_image, now).id;
           },
           py::arg("project"), py::arg("bytes"), py::arg("source_image") = "",
           py::arg("now") = 0, py::arg("actor") = "python")
      .def("snapshot_volume",
           [](Simulation& sim, const std::string& project, const std::string& volume,
              int64_t now, const std::string& actor) {
             return sim.control.snapshot_volume(actor, project, volume, now).id;
           },
           py::arg("project"), py::arg("volume"), py::arg("now") = 0,
           py::arg("actor") = "python")
      .def("launch_vm",
           [](Simulation& sim, const std::string& project, unsigned vcpus, unsigned ram_gb,
              const std::string& boot_volume, int64_t now, const std::string& actor) {
             const auto& vm = sim.control.launch_vm(actor, project, vcpus, ram_gb, boot_volume,
                                                    now);
             return py::make_tuple(vm.id, vm.host);
           },
           py::arg("project"), py::arg("vcpus"), py::arg("ram_gb"),
           py::arg("boot_volume") = "", py::arg("now") = 0, py::arg("actor") = "python")
      .def("terminate_vm",
           [](Simulation& sim, const std::string& vm, int64_t now, const std::string& actor) {
             sim.control.terminate_vm(actor, vm, now);
           },
           py::arg("vm"), py::arg("now") = 0, py::arg("actor") = "python")
      .def("drain_node",
           [](Simulation& sim, uint32_t node, int64_t now, const std::string& actor) {
             auto report = sim.control.drain_node(actor, node, now);
             py::list moves;
             for (const auto& step : report.moves)
               moves.append(py::make_tuple(step.vm, step.from, step.to));
             return moves;
           },
           py::arg("node"), py::arg("now") = 0, py::arg("actor") = "python")
      .def("total_vcpu_capacity",
           [](const Simulation& sim) { return sim.control.total_vcpu_capacity(); })
      // gateway
      .def("create_bucket",
           [](Simulation& sim, const std::string& project, const std::string& name,
              const std::string& tier, uint64_t quota_bytes, int64_t now,
              const std::string& actor) {
             sim.gateway.create_bucket(actor, project, name, gateway::parse_tier(tier),
                                       quota_bytes, now);
           },
           py::arg("project"), py::arg("name"), py::arg("tier"), py::arg("quota_bytes"),
           py::arg("now") = 0, py::arg("actor") = "python")
      .def("put_object",
           [](Simulation& sim, const std::string& tier, const std::string& bucket,
              const std::string& key, const py::bytes& payload,
              const std::optional<std::string>& sse_key, int64_t now,
              const std::string& actor) {
             std::string_view view = payload;
             std::span<const uint8_t> bytes(reinterpret_cast<const uint8_t*>(view.data()),
                                            view.size());
             return meta_to_dict(sim.gateway.put_object(actor, gateway::parse_tier(tier), bucket,
                                                        key, bytes, sse_key, now));
           },
           py::arg("tier"), py::arg("bucket"), py::arg("key"), py::arg("payload"),
           py::arg("sse_key") = std::nullopt, py::arg("now") = 0, py::arg("actor") = "python")
      .def("get_object",
           [](Simulation& sim, const std::string& tier, const std::string& bucket,
              const std::string& key, const std::optional<std::string>& sse_key, int64_t now,
              const std::string& actor) {
             return to_bytes(sim.gateway.get_object(actor, gateway::parse_tier(tier), bucket,
                                                    key, sse_key, now));
           },
           py::arg("tier"), py::arg("bucket"), py::arg("key"),
           py::arg("sse_key") = std::nullopt, py::arg("now") = 0, py::arg("actor") = "python")
      .def("delete_object",
           [](Simulation& sim, const std::string& tier, const std::string& bucket,
              const std::string& key, int64_t now, const std::string& actor) {
             return sim.gateway.delete_object(actor, gateway::parse_tier(tier), bucket, key,
                                              now);
           },
           py::arg("tier"), py::arg("bucket"), py::arg("key"), py::arg("now") = 0,
           py::arg("actor") = "python")
      .def("list_objects",
           [](Simulation& sim, const std::string& tier, const std::string& bucket,
              const std::string& prefix, size_t max_keys,
              const std::optional<std::string>& continuation) {
             auto page = sim.gateway.list_objects(gateway::parse_tier(tier), bucket, prefix,
                                                  max_keys, continuation);
             py::list items;
             for (const auto& meta : page.items) items.append(meta_to_dict(meta));
             py::dict out;
             out["objects"] = items;
             out["continuation"] =
                 page.continuation ? py::object(py::str(*page.continuation)) : py::none();
             return out;
           },
           py::arg("tier"), py::arg("bucket"), py::arg("prefix") = "",
           py::arg("max_keys") = 1000, py::arg("continuation") = std::nullopt)
      .def("set_lifecycle",
           [](Simulation& sim, const std::string& tier, const std::string& bucket, double days,
              int64_t now, const std::string& actor) {
             sim.gateway.set_lifecycle(actor, gateway::parse_tier(tier), bucket,
                                       gateway::LifecyclePolicy{days}, now);
           },
           py::arg("tier"), py::arg("bucket"), py::arg("days"), py::arg("now") = 0,
           py::arg("actor") = "python")
      .def("sweep",
           [](Simulation& sim, int64_t now) {
             auto report = lifecycle::sweep(sim.gateway, now);
             py::dict out;
             py::list deleted;
             for (const auto& d : report.deleted)
               deleted.append(py::make_tuple(d.bucket, d.key, d.created_ts, d.size));
             out["deleted"] = deleted;
             out["bytes_freed"] = report.bytes_freed;
             out["threshold_start_days"] = report.threshold_start_days;
             out["threshold_final_days"] = report.threshold_final_days;
             out["utilization_before"] = report.utilization_before;
             out["utilization_after"] = report.utilization_after;
             return out;
           },
           py::arg("now"))
      .def("cache_utilization",
           [](const Simulation& sim) { return lifecycle::utilization(sim.gateway); })
      // storage plane
      .def("write_pool_object",
           [](Simulation& sim, const std::string& pool, const std::string& object_id,
              const py::bytes& payload) {
             std::string_view view = payload;
             std::span<const uint8_t> bytes(reinterpret_cast<const uint8_t*>(view.data()),
                                            view.size());
             auto [stripe, backend] = sim.cluster.write_object(pool, object_id, bytes);
             py::dict out = stripe_to_dict(stripe);
             out["backend_bytes"] = backend;
             return out;
           },
           py::arg("pool"), py::arg("object_id"), py::arg("payload"))
      .def("read_pool_object",
           [](Simulation& sim, const std::string& pool, const std::string& object_id) {
             return to_bytes(sim.cluster.read_object(pool, object_id));
           },
           py::arg("pool"), py::arg("object_id"))
      .def("pool_accounting",
           [](const Simulation& sim, const std::string& pool) {
             auto acct = sim.cluster.accounting(pool);
             py::dict out;
             out["logical_bytes"] = acct.logical_bytes;
             out["backend_bytes"] = acct.backend_bytes;
             out["amplification"] = acct.amplification;
             return out;
           },
           py::arg("pool"))
      .def("fail_osd", [](Simulation& sim, uint32_t id) { sim.cluster.fail_osd(id); },
           py::arg("id"))
      .def("revive_osd", [](Simulation& sim, uint32_t id) { sim.cluster.revive_osd(id); },
           py::arg("id"))
      .def("repair_pool",
           [](Simulation& sim, const std::string& pool) {
             auto report = sim.cluster.repair(pool);
             py::dict out;
             out["stripes_repaired"] = report.stripes_repaired;
             out["stripes_unrecoverable"] = report.stripes_unrecoverable;
             out["bytes_rebuilt"] = report.bytes_rebuilt;
             return out;
           },
           py::arg("pool"))
      // policy
      .def("add_rule",
           [](Simulation& sim, const std::string& project, uint16_t port,
              const std::string& scope, const std::string& note) {
             netpolicy::SecurityGroupRule rule;
             rule.project = project;
             rule.port = port;
             rule.source_scope = netpolicy::parse_rule_scope(scope);
             rule.note = note;
             sim.rules.push_back(std::move(rule));
           },
           py::arg("project"), py::arg("port"), py::arg("scope"), py::arg("note") = "")
      .def("policy_eval",
           [](Simulation& sim, const std::string& src, const std::string& dst_project,
              uint16_t port, bool ssl, bool egress, int64_t now) {
             netpolicy::PacketQuery query;
             query.direction =
                 egress ? netpolicy::Direction::Egress : netpolicy::Direction::Ingress;
             query.src = netpolicy::Ipv4::parse(src);
             query.dst_project = dst_project;
             query.port = port;
             query.ssl = ssl;
             auto decision = netpolicy::evaluate(query, sim.rules, sim.scope_config, &sim.audit,
                                                 now, "python");
             return py::make_tuple(decision.allow, decision.reason);
           },
           py::arg("src"), py::arg("dst_project"), py::arg("port"), py::arg("ssl") = false,
           py::arg("egress") = false, py::arg("now") = 0)
      // audit
      .def("audit_size", [](const Simulation& sim) { return sim.audit.size(); })
      .def("audit_verify",
           [](const Simulation& sim) -> py::object {
             auto bad = sim.audit.verify();
             if (bad) return py::int_(*bad);
             return py::none();
           })
      // persistence
      .def("save", [](const Simulation& sim, const std::string& path) {
            state::save(sim, path);
          },
          py::arg("path"))
      .def_static("load", [](const std::string& path) { return state::load(path); },
                  py::arg("path"));

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          int code = cli::run(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run one CLI command; returns (exit_code, stdout, stderr).");

  m.attr("__version__") = "0.1.0";
}
