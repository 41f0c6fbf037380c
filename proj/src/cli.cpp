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

#include "wg/cli.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "wg/errors.hpp"
#include "wg/http.hpp"
#include "wg/lifecycle.hpp"
#include "wg/report.hpp"
#include "wg/state.hpp"

namespace wg::cli {

namespace {

constexpr uint64_t kGiBBytes = 1ull << 30;

/// Advisory lock on <state>.lock for the lifetime of one command.
class StateLock {
 public:
  explicit StateLock(const std::filesystem::path& state_path) {
    std::filesystem::path lock_path = state_path;
    lock_path += ".lock";
    fd_ = ::open(lock_path.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ >= 0) ::flock(fd_, LOCK_EX);
  }
  ~StateLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  StateLock(const StateLock&) = delete;
  StateLock& operator=(const StateLock&) = delete;

 private:
  int fd_ = -1;
};

std::string default_state_path() {
  if (const char* env = std::getenv("WG_STATE"); env && *env) return env;
  return "wg_state.json";
}

std::vector<uint8_t> read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::UnknownResource, "cannot open " + path);
  std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
  return data;
}

std::string read_text_file(const std::string& path) {
  auto bytes = read_binary_file(path);
  return std::string(bytes.begin(), bytes.end());
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::istringstream is(csv);
  std::string token;
  while (std::getline(is, token, ',')) {
    if (token.empty()) continue;
    out.push_back(std::stod(token));
  }
  if (out.empty()) fail(Errc::ValidationError, "empty list: " + csv);
  return out;
}

std::vector<unsigned> parse_unsigned_list(const std::string& csv) {
  std::vector<unsigned> out;
  std::istringstream is(csv);
  std::string token;
  while (std::getline(is, token, ',')) {
    if (token.empty()) continue;
    out.push_back(unsigned(std::stoul(token)));
  }
  if (out.empty()) fail(Errc::ValidationError, "empty list: " + csv);
  return out;
}

/// Whitespace tokenizer with double-quote grouping for scenario lines.
std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::string current;
  bool in_quotes = false;
  bool have_token = false;
  for (char c : line) {
    if (in_quotes) {
      if (c == '"')
        in_quotes = false;
      else
        current.push_back(c);
    } else if (c == '"') {
      in_quotes = true;
      have_token = true;
    } else if (c == ' ' || c == '\t') {
      if (have_token) {
        tokens.push_back(current);
        current.clear();
        have_token = false;
      }
    } else {
      current.push_back(c);
      have_token = true;
    }
  }
  if (have_token) tokens.push_back(current);
  return tokens;
}

void print_project(std::ostream& out, const ctl::Project& p) {
  out << p.id << "  vcpus " << p.usage.vcpus << "/" << p.subscription.vcpu_quota() << "  ram "
      << p.usage.ram_gb << "/" << p.subscription.ram_quota_gb() << " GB  volume "
      << p.usage.volume_bytes << "/" << p.subscription.volume_quota_bytes() << " bytes"
      << (p.subscription.dbgap_approved ? "  [dbgap]" : "") << "\n";
}

struct Ctx {
  std::string state_path;
  std::string actor = "operator";
  int64_t now = 0;
  bool now_given = false;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  int64_t clock() const { return now_given ? now : int64_t(std::time(nullptr)); }
  std::unique_ptr<Simulation> load() const { return state::load(state_path); }
  void save(const Simulation& sim) const { state::save(sim, state_path); }
};

// Option targets for every subcommand; lives for the whole run() call so
// CLI11 bindings and callbacks stay valid (run() recurses for scenarios).
struct Opts {
  // init
  ClusterLayout layout;
  uint64_t seed = 0;
  double osd_capacity_gb = 600, block_gb = 200, cache_gb = 500, secure_gb = 400,
         general_gb = 100;
  std::vector<std::string> campus_cidrs, bastion_addrs;
  // project
  std::string project_id;
  bool dbgap = false;
  unsigned addon_vcpus = 0, addon_tb = 0;
  std::vector<std::string> members;
  std::string addon_id;
  unsigned buy_vcpus = 0, buy_tb = 0;
  std::string show_id;
  // bucket
  std::string bucket_project, bucket_name, tier_text = "s3general", ls_tier;
  double bucket_quota_gb = 10.0;
  uint64_t bucket_quota_bytes = 0;
  // object
  std::string obj_tier, obj_bucket, obj_key, obj_data, obj_file, obj_sse, obj_out, obj_prefix,
      obj_continuation;
  size_t obj_max_keys = 1000;
  // lifecycle
  std::string lc_tier, lc_bucket;
  double lc_days = 60.0;
  // volume
  std::string vol_project, vol_image, snap_project, snap_volume, vol_rm_id, vol_ls_project;
  double vol_gb = 0, vol_tb = 0;
  uint64_t vol_bytes = 0;
  // vm
  std::string vm_project, vm_boot, vm_terminate_id, image_to_parse;
  unsigned vm_vcpus = 1, vm_ram_gb = 1;
  // node
  uint32_t drain_id = 0, undrain_id = 0, osd_fail_id = 0, osd_revive_id = 0;
  std::string repair_pool;
  // policy
  std::string pol_src, pol_dst_vm, pol_dst_project, rule_project, rule_port, rule_scope,
      rule_note, rules_file, rules_out;
  uint16_t pol_port = 0;
  bool pol_ssl = false, pol_egress = false;
  // audit
  std::string q_actor, q_resource;
  int64_t q_from = 0, q_to = 0;
  // model / report
  std::vector<std::string> schemes;
  std::string sizes_csv = "0.1,0.5,1,2,4";
  std::string threads_csv = "1,2,4,8,16";
  double bandwidth = 0, iops = 0, penalty = 0.78;
  double mem_gb = 2.0, fill = 0.8, peak = 40.0;
  std::vector<std::string> class_overrides;
  // scenario / serve
  std::string scenario_file;
  int serve_port = 8080;
  std::string serve_host = "127.0.0.1";
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Ctx ctx;
  ctx.out = &out;
  ctx.err = &err;
  ctx.state_path = default_state_path();
  Opts o;

  CLI::App app{"wgcloud: a desk-scale controlled-access research cloud"};
  app.require_subcommand(1);
  app.add_option("--state", ctx.state_path, "state file path (env WG_STATE)");
  app.add_option("--actor", ctx.actor, "acting identity recorded in the audit log");
  app.add_option("--now", ctx.now, "logical clock in seconds")
      ->each([&ctx](const std::string&) { ctx.now_given = true; });

  int exit_code = 0;

  // ---- init
  auto* init = app.add_subcommand("init", "create a fresh deployment state");
  init->add_option("--nodes", o.layout.compute_nodes, "compute node count");
  init->add_option("--threads-per-node", o.layout.threads_per_node, "hardware threads per node");
  init->add_option("--ram-per-node", o.layout.ram_gb_per_node, "GB of RAM per node");
  init->add_option("--osds", o.layout.osds, "storage daemon count");
  init->add_option("--osd-capacity-gb", o.osd_capacity_gb, "capacity per OSD in GiB");
  init->add_option("--block-quota-gb", o.block_gb, "block pool quota in GiB");
  init->add_option("--cache-quota-gb", o.cache_gb, "cache pool quota in GiB");
  init->add_option("--secure-quota-gb", o.secure_gb, "secure pool quota in GiB");
  init->add_option("--general-quota-gb", o.general_gb, "general pool quota in GiB");
  init->add_option("--seed", o.seed, "deterministic rng seed");
  init->add_option("--campus-cidr", o.campus_cidrs, "campus address range (repeatable)");
  init->add_option("--bastion", o.bastion_addrs, "bastion address (repeatable)");
  init->callback([&] {
    o.layout.osd_capacity_bytes = uint64_t(o.osd_capacity_gb * double(kGiBBytes));
    o.layout.block_quota_bytes = uint64_t(o.block_gb * double(kGiBBytes));
    o.layout.cache_quota_bytes = uint64_t(o.cache_gb * double(kGiBBytes));
    o.layout.secure_quota_bytes = uint64_t(o.secure_gb * double(kGiBBytes));
    o.layout.general_quota_bytes = uint64_t(o.general_gb * double(kGiBBytes));
    if (!o.campus_cidrs.empty()) o.layout.campus_cidrs = o.campus_cidrs;
    if (!o.bastion_addrs.empty()) o.layout.bastion_addrs = o.bastion_addrs;
    StateLock lock(ctx.state_path);
    Simulation sim(o.seed);
    sim.init_cluster(o.layout);
    ctx.save(sim);
    *ctx.out << "initialized " << ctx.state_path << "\n"
             << "compute_nodes: " << o.layout.compute_nodes << " x "
             << o.layout.threads_per_node << " threads ("
             << sim.control.total_vcpu_capacity() << " vcpus at 2x)\n"
             << "osds: " << o.layout.osds << " x " << o.layout.osd_capacity_bytes << " bytes\n"
             << "pools: block=rep:3 s3cache=ec:4,2 s3secure=ec:4,2 s3general=ec:4,2\n";
  });

  // ---- project
  auto* project = app.add_subcommand("project", "tenant management");
  project->require_subcommand(1);
  auto* prj_create = project->add_subcommand("create", "create a project");
  prj_create->add_option("id", o.project_id, "project id")->required();
  prj_create->add_flag("--base", "base bundle: 16 vCPUs, 32 GB RAM, 2 TB volume (the default)");
  prj_create->add_flag("--dbgap", o.dbgap, "dbGaP-approved project");
  prj_create->add_option("--addon-vcpus", o.addon_vcpus, "extra vCPUs beyond the base 16");
  prj_create->add_option("--addon-volume-tb", o.addon_tb, "extra volume TB beyond the base 2");
  prj_create->add_option("--member", o.members, "member actor id (repeatable)");
  prj_create->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    ctl::Subscription sub;
    sub.dbgap_approved = o.dbgap;
    sub.addon_vcpus = o.addon_vcpus;
    sub.addon_volume_tb = o.addon_tb;
    auto& p = sim->control.create_project(ctx.actor, o.project_id, sub, ctx.clock());
    for (const auto& m : o.members) p.members.insert(m);
    auto subnet = sim->assign_project_subnet(o.project_id);
    ctx.save(*sim);
    *ctx.out << "created project " << o.project_id << " subnet " << subnet.to_string() << "\n";
  });

  auto* prj_addon = project->add_subcommand("addon", "buy quota add-ons");
  prj_addon->add_option("id", o.addon_id, "project id")->required();
  prj_addon->add_option("--vcpus", o.buy_vcpus, "vCPUs to add");
  prj_addon->add_option("--volume-tb", o.buy_tb, "volume TB to add");
  prj_addon->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    sim->control.add_quota_addons(ctx.actor, o.addon_id, o.buy_vcpus, o.buy_tb, ctx.clock());
    ctx.save(*sim);
    auto p = sim->control.project_info(o.addon_id);
    *ctx.out << "project " << o.addon_id << " now has " << p.subscription.vcpu_quota()
             << " vcpus, " << p.subscription.volume_quota_bytes() << " volume bytes\n";
  });

  auto* prj_show = project->add_subcommand("show", "show one project");
  prj_show->add_option("id", o.show_id, "project id")->required();
  prj_show->callback([&] {
    auto sim = ctx.load();
    print_project(*ctx.out, sim->control.project_info(o.show_id));
  });

  auto* prj_ls = project->add_subcommand("ls", "list projects");
  prj_ls->callback([&] {
    auto sim = ctx.load();
    for (const auto& p : sim->control.projects()) print_project(*ctx.out, p);
  });

  // ---- bucket
  auto* bucket = app.add_subcommand("bucket", "bucket management");
  bucket->require_subcommand(1);
  auto* bkt_create = bucket->add_subcommand("create", "create a bucket");
  bkt_create->add_option("project", o.bucket_project, "owning project")->required();
  bkt_create->add_option("name", o.bucket_name, "bucket name")->required();
  bkt_create->add_option("--tier", o.tier_text, "s3cache | s3secure | s3general");
  bkt_create->add_option("--quota-gb", o.bucket_quota_gb, "bucket quota in GiB");
  bkt_create->add_option("--quota-bytes", o.bucket_quota_bytes,
                         "bucket quota in bytes (wins over GiB)");
  bkt_create->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    uint64_t quota = o.bucket_quota_bytes ? o.bucket_quota_bytes
                                          : uint64_t(o.bucket_quota_gb * double(kGiBBytes));
    gateway::Bucket* created = nullptr;
    try {
      created = &sim->gateway.create_bucket(ctx.actor, o.bucket_project, o.bucket_name,
                                            gateway::parse_tier(o.tier_text), quota, ctx.clock());
    } catch (...) {
      ctx.save(*sim);  // keep the audit trail of the denied attempt
      throw;
    }
    ctx.save(*sim);
    *ctx.out << "created bucket " << gateway::tier_name(created->tier) << "/" << created->name
             << " quota " << created->quota_bytes << " bytes\n";
  });

  auto* bkt_ls = bucket->add_subcommand("ls", "list buckets");
  bkt_ls->add_option("--tier", o.ls_tier, "restrict to one tier");
  bkt_ls->callback([&] {
    auto sim = ctx.load();
    for (const auto& b : sim->gateway.all_buckets()) {
      if (!o.ls_tier.empty() && gateway::tier_name(b.tier) != o.ls_tier) continue;
      *ctx.out << gateway::tier_name(b.tier) << "/" << b.name << "  owner " << b.owner
               << "  usage " << b.usage_bytes << "/" << b.quota_bytes << "  objects "
               << b.objects.size();
      if (b.lifecycle) *ctx.out << "  lifecycle " << b.lifecycle->expiration_days << "d";
      *ctx.out << "\n";
    }
  });

  // ---- object
  auto* object = app.add_subcommand("object", "object operations");
  object->require_subcommand(1);
  auto* obj_put = object->add_subcommand("put", "store an object");
  obj_put->add_option("tier", o.obj_tier, "tier")->required();
  obj_put->add_option("bucket", o.obj_bucket, "bucket name")->required();
  obj_put->add_option("key", o.obj_key, "object key")->required();
  obj_put->add_option("--data", o.obj_data, "inline payload");
  auto* put_file = obj_put->add_option("--file", o.obj_file, "payload file");
  auto* put_sse = obj_put->add_option("--sse-key", o.obj_sse, "customer encryption key");
  obj_put->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    std::vector<uint8_t> payload;
    if (put_file->count())
      payload = read_binary_file(o.obj_file);
    else
      payload.assign(o.obj_data.begin(), o.obj_data.end());
    std::optional<std::string> customer_key;
    if (put_sse->count()) customer_key = o.obj_sse;
    gateway::ObjectMeta meta;
    try {
      meta = sim->gateway.put_object(ctx.actor, gateway::parse_tier(o.obj_tier), o.obj_bucket,
                                     o.obj_key, payload, customer_key, ctx.clock());
    } catch (...) {
      ctx.save(*sim);  // keep the audit trail of the failed attempt
      throw;
    }
    ctx.save(*sim);
    *ctx.out << "stored " << meta.key << " (" << meta.size << " bytes, sha256 "
             << meta.content_hash.substr(0, 12)
             << (meta.sse_fingerprint.empty() ? ")" : ", sse-c)") << "\n";
  });

  auto* obj_get = object->add_subcommand("get", "fetch an object");
  obj_get->add_option("tier", o.obj_tier, "tier")->required();
  obj_get->add_option("bucket", o.obj_bucket, "bucket name")->required();
  obj_get->add_option("key", o.obj_key, "object key")->required();
  auto* get_sse = obj_get->add_option("--sse-key", o.obj_sse, "customer encryption key");
  obj_get->add_option("--out", o.obj_out, "write payload to a file instead of stdout");
  obj_get->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    std::optional<std::string> customer_key;
    if (get_sse->count()) customer_key = o.obj_sse;
    std::vector<uint8_t> payload;
    try {
      payload = sim->gateway.get_object(ctx.actor, gateway::parse_tier(o.obj_tier), o.obj_bucket,
                                        o.obj_key, customer_key, ctx.clock());
    } catch (...) {
      ctx.save(*sim);
      throw;
    }
    ctx.save(*sim);
    if (!o.obj_out.empty()) {
      std::ofstream of(o.obj_out, std::ios::binary);
      of.write(reinterpret_cast<const char*>(payload.data()), std::streamsize(payload.size()));
      *ctx.out << "wrote " << payload.size() << " bytes to " << o.obj_out << "\n";
    } else {
      ctx.out->write(reinterpret_cast<const char*>(payload.data()),
                     std::streamsize(payload.size()));
    }
  });

  auto* obj_rm = object->add_subcommand("rm", "delete an object");
  obj_rm->add_option("tier", o.obj_tier, "tier")->required();
  obj_rm->add_option("bucket", o.obj_bucket, "bucket name")->required();
  obj_rm->add_option("key", o.obj_key, "object key")->required();
  obj_rm->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    uint64_t freed = 0;
    try {
      freed = sim->gateway.delete_object(ctx.actor, gateway::parse_tier(o.obj_tier),
                                         o.obj_bucket, o.obj_key, ctx.clock());
    } catch (...) {
      ctx.save(*sim);
      throw;
    }
    ctx.save(*sim);
    *ctx.out << "deleted " << o.obj_key << " (" << freed << " bytes)\n";
  });

  auto* obj_ls = object->add_subcommand("ls", "list objects");
  obj_ls->add_option("tier", o.obj_tier, "tier")->required();
  obj_ls->add_option("bucket", o.obj_bucket, "bucket name")->required();
  obj_ls->add_option("--prefix", o.obj_prefix, "key prefix filter");
  obj_ls->add_option("--max-keys", o.obj_max_keys, "page size");
  auto* ls_cont = obj_ls->add_option("--continuation", o.obj_continuation,
                                     "resume after this key");
  obj_ls->callback([&] {
    auto sim = ctx.load();
    std::optional<std::string> cont;
    if (ls_cont->count()) cont = o.obj_continuation;
    auto page = sim->gateway.list_objects(gateway::parse_tier(o.obj_tier), o.obj_bucket,
                                          o.obj_prefix, o.obj_max_keys, cont);
    for (const auto& meta : page.items)
      *ctx.out << meta.key << "\t" << meta.size << "\t" << meta.created_ts << "\n";
    if (page.continuation) *ctx.out << "continuation: " << *page.continuation << "\n";
  });

  // ---- lifecycle
  auto* lc = app.add_subcommand("lifecycle", "cache expiration");
  lc->require_subcommand(1);
  auto* lc_set = lc->add_subcommand("set", "attach a lifecycle policy");
  lc_set->add_option("tier", o.lc_tier, "tier")->required();
  lc_set->add_option("bucket", o.lc_bucket, "bucket name")->required();
  lc_set->add_option("--days", o.lc_days, "expiration in days (>= 1)")->required();
  lc_set->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    try {
      sim->gateway.set_lifecycle(ctx.actor, gateway::parse_tier(o.lc_tier), o.lc_bucket,
                                 gateway::LifecyclePolicy{o.lc_days}, ctx.clock());
    } catch (...) {
      ctx.save(*sim);
      throw;
    }
    ctx.save(*sim);
    *ctx.out << "lifecycle " << o.lc_days << "d on " << o.lc_tier << "/" << o.lc_bucket << "\n";
  });

  auto* lc_sweep = lc->add_subcommand("sweep", "run the FIFO cache sweeper");
  lc_sweep->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    auto report = lifecycle::sweep(sim->gateway, ctx.clock());
    ctx.save(*sim);
    *ctx.out << report.to_table() << report.to_machine_lines();
  });

  // ---- volume
  auto* volume = app.add_subcommand("volume", "volumes and snapshots");
  volume->require_subcommand(1);
  auto* vol_create = volume->add_subcommand("create", "create a volume");
  vol_create->add_option("project", o.vol_project, "owning project")->required();
  vol_create->add_option("--gb", o.vol_gb, "size in GiB");
  vol_create->add_option("--tb", o.vol_tb, "size in TiB");
  vol_create->add_option("--bytes", o.vol_bytes, "size in bytes");
  vol_create->add_option("--from-image", o.vol_image, "boot image to clone (CoW)");
  vol_create->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    uint64_t size = o.vol_bytes;
    if (size == 0 && o.vol_tb > 0) size = uint64_t(o.vol_tb * double(ctl::kBytesPerTb));
    if (size == 0 && o.vol_gb > 0) size = uint64_t(o.vol_gb * double(kGiBBytes));
    auto& vol = sim->control.create_volume(ctx.actor, o.vol_project, size, o.vol_image,
                                           ctx.clock());
    ctx.save(*sim);
    *ctx.out << "created " << vol.id << " (" << vol.logical_bytes << " bytes"
             << (vol.source_image.empty() ? "" : ", clone of " + vol.source_image) << ")\n";
  });

  auto* vol_snap = volume->add_subcommand("snapshot", "snapshot a volume");
  vol_snap->add_option("project", o.snap_project, "owning project")->required();
  vol_snap->add_option("volume", o.snap_volume, "volume id")->required();
  vol_snap->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    auto& s = sim->control.snapshot_volume(ctx.actor, o.snap_project, o.snap_volume,
                                           ctx.clock());
    ctx.save(*sim);
    *ctx.out << "created " << s.id << " (" << s.logical_bytes << " bytes)\n";
  });

  auto* vol_rm = volume->add_subcommand("rm", "delete a volume or snapshot");
  vol_rm->add_option("volume", o.vol_rm_id, "volume id")->required();
  vol_rm->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    sim->control.delete_volume(ctx.actor, o.vol_rm_id, ctx.clock());
    ctx.save(*sim);
    *ctx.out << "deleted " << o.vol_rm_id << "\n";
  });

  auto* vol_ls = volume->add_subcommand("ls", "list volumes");
  vol_ls->add_option("--project", o.vol_ls_project, "restrict to one project");
  vol_ls->callback([&] {
    auto sim = ctx.load();
    for (const auto& v : sim->control.volumes()) {
      if (!o.vol_ls_project.empty() && v.project != o.vol_ls_project) continue;
      *ctx.out << v.id << "\t" << v.project << "\t" << ctl::volume_kind_name(v.kind) << "\t"
               << v.logical_bytes;
      if (!v.source_image.empty()) *ctx.out << "\tfrom " << v.source_image;
      *ctx.out << "\n";
    }
  });

  // ---- vm
  auto* vm = app.add_subcommand("vm", "virtual machines");
  vm->require_subcommand(1);
  auto* vm_launch = vm->add_subcommand("launch", "launch a vm");
  vm_launch->add_option("project", o.vm_project, "owning project")->required();
  vm_launch->add_option("--vcpus", o.vm_vcpus, "vCPU count")->required();
  vm_launch->add_option("--ram-gb", o.vm_ram_gb, "RAM in GB");
  vm_launch->add_option("--boot-volume", o.vm_boot, "boot volume id");
  vm_launch->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    auto& v = sim->control.launch_vm(ctx.actor, o.vm_project, o.vm_vcpus, o.vm_ram_gb,
                                     o.vm_boot, ctx.clock());
    ctx.save(*sim);
    *ctx.out << "launched " << v.id << " on node " << v.host << " (" << v.vcpus << " vcpu, "
             << v.ram_gb << " GB)\n";
  });

  auto* vm_term = vm->add_subcommand("terminate", "terminate a vm");
  vm_term->add_option("vm", o.vm_terminate_id, "vm id")->required();
  vm_term->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    sim->control.terminate_vm(ctx.actor, o.vm_terminate_id, ctx.clock());
    ctx.save(*sim);
    *ctx.out << "terminated " << o.vm_terminate_id << "\n";
  });

  auto* vm_ls = vm->add_subcommand("ls", "list vms");
  vm_ls->callback([&] {
    auto sim = ctx.load();
    for (const auto& v : sim->control.vms())
      *ctx.out << v.id << "\t" << v.project << "\tnode " << v.host << "\t" << v.vcpus
               << " vcpu\t" << v.ram_gb << " GB\n";
  });

  auto* vm_parse = vm->add_subcommand("parse-image", "parse an image name");
  vm_parse->add_option("name", o.image_to_parse, "image name")->required();
  vm_parse->callback([&] {
    auto parsed = ctl::parse_image_name(o.image_to_parse);
    *ctx.out << "distro: " << parsed.distro << "\nversion: " << parsed.version << "\ntags:";
    for (const auto& tag : parsed.tags) *ctx.out << " " << tag;
    *ctx.out << "\ncanonical: " << parsed.canonical() << "\n";
  });

  // ---- node
  auto* node = app.add_subcommand("node", "compute nodes and storage daemons");
  node->require_subcommand(1);
  auto* node_ls = node->add_subcommand("ls", "list compute nodes");
  node_ls->callback([&] {
    auto sim = ctx.load();
    for (const auto& n : sim->control.nodes())
      *ctx.out << "node " << n.id << "\t" << n.vcpus_used << "/" << n.vcpu_capacity()
               << " vcpu\t" << n.ram_used_gb << "/" << n.ram_capacity_gb() << " GB\t"
               << n.resident.size() << " vms" << (n.maintenance ? "\t[maintenance]" : "")
               << "\n";
  });

  auto* node_drain = node->add_subcommand("drain", "live-migrate everything off a node");
  node_drain->add_option("id", o.drain_id, "node id")->required();
  node_drain->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    auto report = sim->control.drain_node(ctx.actor, o.drain_id, ctx.clock());
    ctx.save(*sim);
    *ctx.out << report.to_table();
  });

  auto* node_undrain = node->add_subcommand("undrain", "return a node to service");
  node_undrain->add_option("id", o.undrain_id, "node id")->required();
  node_undrain->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    sim->control.undrain_node(ctx.actor, o.undrain_id, ctx.clock());
    ctx.save(*sim);
    *ctx.out << "node " << o.undrain_id << " back in service\n";
  });

  auto* osd_ls = node->add_subcommand("osd-ls", "list storage daemons");
  osd_ls->callback([&] {
    auto sim = ctx.load();
    for (uint32_t id : sim->cluster.osd_ids()) {
      const auto& osd = sim->cluster.osd(id);
      *ctx.out << "osd " << id << "\t" << osd.stored_bytes() << "/" << osd.capacity_bytes
               << " bytes\t" << osd.shards.size() << " shards\t" << (osd.up ? "up" : "down")
               << (osd.encrypted_at_rest ? "\t[luks]" : "") << "\n";
    }
  });

  auto* osd_fail = node->add_subcommand("osd-fail", "mark an OSD down");
  osd_fail->add_option("id", o.osd_fail_id, "osd id")->required();
  osd_fail->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    sim->cluster.fail_osd(o.osd_fail_id);
    ctx.save(*sim);
    *ctx.out << "osd " << o.osd_fail_id << " down\n";
  });

  auto* osd_revive = node->add_subcommand("osd-revive", "mark an OSD up");
  osd_revive->add_option("id", o.osd_revive_id, "osd id")->required();
  osd_revive->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    sim->cluster.revive_osd(o.osd_revive_id);
    ctx.save(*sim);
    *ctx.out << "osd " << o.osd_revive_id << " up\n";
  });

  auto* node_repair = node->add_subcommand("repair", "rebuild lost shards in a pool");
  node_repair->add_option("pool", o.repair_pool, "pool name")->required();
  node_repair->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    auto report = sim->cluster.repair(o.repair_pool);
    ctx.save(*sim);
    *ctx.out << report.to_table();
  });

  // ---- policy
  auto* policy = app.add_subcommand("policy", "firewall policy");
  policy->require_subcommand(1);
  auto* pol_eval = policy->add_subcommand("eval", "evaluate one packet");
  pol_eval->add_option("--src", o.pol_src, "source IPv4 address")->required();
  pol_eval->add_option("--dst", o.pol_dst_vm, "destination vm id");
  pol_eval->add_option("--dst-project", o.pol_dst_project,
                       "destination project (alternative to --dst)");
  pol_eval->add_option("--port", o.pol_port, "destination port")->required();
  pol_eval->add_flag("--ssl", o.pol_ssl, "connection uses SSL");
  pol_eval->add_flag("--egress", o.pol_egress, "evaluate an egress packet");
  pol_eval->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    std::string project = o.pol_dst_project;
    if (project.empty() && !o.pol_dst_vm.empty())
      project = sim->control.vm_info(o.pol_dst_vm).project;
    if (project.empty() && !o.pol_egress)
      fail(Errc::ValidationError, "need --dst or --dst-project for ingress");
    netpolicy::PacketQuery query;
    query.direction = o.pol_egress ? netpolicy::Direction::Egress
                                   : netpolicy::Direction::Ingress;
    query.src = netpolicy::Ipv4::parse(o.pol_src);
    query.dst_project = project;
    query.port = o.pol_port;
    query.ssl = o.pol_ssl;
    auto decision = netpolicy::evaluate(query, sim->rules, sim->scope_config, &sim->audit,
                                        ctx.clock(), ctx.actor);
    ctx.save(*sim);
    if (decision.allow) {
      *ctx.out << "ALLOW\n";
    } else {
      *ctx.out << "DENY " << decision.reason << "\n";
      exit_code = 1;
    }
  });

  auto* pol_add = policy->add_subcommand("add-rule", "add a security group exception");
  pol_add->add_option("project", o.rule_project, "project id")->required();
  pol_add->add_option("port", o.rule_port, "port number or 'any'")->required();
  pol_add->add_option("scope", o.rule_scope, "campus | bastion")->required();
  pol_add->add_option("--note", o.rule_note, "free-text note");
  pol_add->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    std::string line = o.rule_project + " " + o.rule_port + " " + o.rule_scope;
    if (!o.rule_note.empty()) line += " # " + o.rule_note;
    auto parsed = netpolicy::parse_rules(line);
    sim->rules.push_back(parsed.at(0));
    ctx.save(*sim);
    *ctx.out << "rule added: " << netpolicy::format_rules({&sim->rules.back(), 1});
  });

  auto* pol_ls = policy->add_subcommand("ls-rules", "list security group rules");
  pol_ls->callback([&] {
    auto sim = ctx.load();
    *ctx.out << netpolicy::format_rules(sim->rules);
  });

  auto* pol_load = policy->add_subcommand("load-rules", "replace rules from a file");
  pol_load->add_option("file", o.rules_file, "rule file")->required();
  pol_load->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    sim->rules = netpolicy::parse_rules(read_text_file(o.rules_file));
    ctx.save(*sim);
    *ctx.out << "loaded " << sim->rules.size() << " rules\n";
  });

  auto* pol_save = policy->add_subcommand("save-rules", "write rules to a file");
  pol_save->add_option("file", o.rules_out, "rule file")->required();
  pol_save->callback([&] {
    auto sim = ctx.load();
    std::ofstream of(o.rules_out, std::ios::binary);
    of << netpolicy::format_rules(sim->rules);
    *ctx.out << "saved " << sim->rules.size() << " rules\n";
  });

  // ---- audit
  auto* audit_cmd = app.add_subcommand("audit", "compliance log");
  audit_cmd->require_subcommand(1);
  auto* audit_verify = audit_cmd->add_subcommand("verify", "recompute the hash chain");
  audit_verify->callback([&] {
    auto sim = ctx.load();
    auto bad = sim->audit.verify();
    if (bad) {
      *ctx.out << "chain broken at seq " << *bad << "\n";
      exit_code = 1;
    } else {
      *ctx.out << "ok (" << sim->audit.size() << " entries)\n";
    }
  });

  auto* audit_query = audit_cmd->add_subcommand("query", "filter entries");
  auto* qa = audit_query->add_option("--actor", o.q_actor, "actor filter");
  auto* qr = audit_query->add_option("--resource", o.q_resource, "resource filter");
  auto* qf = audit_query->add_option("--from", o.q_from, "inclusive lower ts bound");
  auto* qt = audit_query->add_option("--to", o.q_to, "inclusive upper ts bound");
  audit_query->callback([&] {
    auto sim = ctx.load();
    audit::Log::Filter filter;
    if (qa->count()) filter.actor = o.q_actor;
    if (qr->count()) filter.resource = o.q_resource;
    if (qf->count()) filter.from_ts = o.q_from;
    if (qt->count()) filter.to_ts = o.q_to;
    for (const auto& e : sim->audit.query(filter)) *ctx.out << audit::entry_line(e) << "\n";
  });

  // ---- model
  auto* model_cmd = app.add_subcommand("model", "analytic performance models");
  model_cmd->require_subcommand(1);
  auto* model_thr = model_cmd->add_subcommand("throughput", "client/backend write throughput");
  model_thr->add_option("--scheme", o.schemes,
                        "redundancy scheme, e.g. rep:3 or ec:4,2 (repeatable)");
  model_thr->add_option("--sizes", o.sizes_csv, "comma-separated object sizes in MB");
  model_thr->add_option("--bandwidth", o.bandwidth, "backend bandwidth MB/s (default: calibrated)");
  model_thr->add_option("--iops", o.iops, "backend IOPS budget (default: calibrated)");
  model_thr->add_option("--penalty", o.penalty, "erasure-coding cpu penalty factor");
  model_thr->callback([&] {
    perfmodel::BackendModel model = perfmodel::default_calibrated_model();
    if (o.bandwidth > 0) model.backend_bandwidth_mbps = o.bandwidth;
    if (o.iops > 0) model.iops_budget = o.iops;
    model.cpu_penalty_ec = o.penalty;
    std::vector<poolstore::Redundancy> parsed;
    std::vector<std::string> schemes = o.schemes;
    if (schemes.empty()) schemes = {"rep:3", "ec:4,2"};
    for (const auto& s : schemes) parsed.push_back(poolstore::Redundancy::parse(s));
    auto rendered = report::throughput(model, parsed, parse_double_list(o.sizes_csv));
    *ctx.out << rendered.table << "\n" << rendered.csv;
  });

  auto* model_hpl = model_cmd->add_subcommand("hpl", "benchmark problem sizing");
  model_hpl->add_option("--threads", o.threads_csv, "comma-separated thread counts");
  model_hpl->add_option("--mem-gb", o.mem_gb, "GiB of memory per thread");
  model_hpl->add_option("--fill", o.fill, "memory fill fraction");
  model_hpl->add_option("--peak", o.peak, "peak GFLOPS per core");
  model_hpl->callback([&] {
    perfmodel::HplConfig base;
    base.mem_per_thread_bytes = o.mem_gb * double(kGiBBytes);
    base.fill = o.fill;
    base.peak_gflops_per_core = o.peak;
    auto rendered = report::scaling(parse_unsigned_list(o.threads_csv), base);
    *ctx.out << rendered.table << "\n" << rendered.csv;
  });

  // ---- report
  auto* report_cmd = app.add_subcommand("report", "state and model reports");
  report_cmd->require_subcommand(1);
  auto* rep_thr = report_cmd->add_subcommand("throughput", "calibrated write throughput table");
  rep_thr->add_option("--sizes", o.sizes_csv, "comma-separated object sizes in MB");
  rep_thr->callback([&] {
    auto rendered = report::throughput(
        perfmodel::default_calibrated_model(),
        {poolstore::Redundancy::replicated(3), poolstore::Redundancy::erasure_coded(4, 2)},
        parse_double_list(o.sizes_csv));
    *ctx.out << rendered.table << "\n" << rendered.csv;
  });

  auto* rep_scaling = report_cmd->add_subcommand("scaling", "benchmark size scaling table");
  rep_scaling->add_option("--threads", o.threads_csv, "comma-separated thread counts");
  rep_scaling->callback([&] {
    auto rendered = report::scaling(parse_unsigned_list(o.threads_csv), perfmodel::HplConfig{});
    *ctx.out << rendered.table << "\n" << rendered.csv;
  });

  auto* rep_util = report_cmd->add_subcommand("utilization", "pool and cache fill levels");
  rep_util->callback([&] {
    auto sim = ctx.load();
    auto rendered = report::utilization(*sim);
    *ctx.out << rendered.table << "\n" << rendered.csv;
  });

  auto* rep_pricing = report_cmd->add_subcommand("pricing", "cost-recovery price list");
  rep_pricing->add_option("--class", o.class_overrides,
                          "override a class as name=annual_cost:capacity (repeatable)");
  rep_pricing->callback([&] {
    ctl::CostModel model = ctl::example_cost_model();
    for (const auto& text : o.class_overrides) {
      size_t eq = text.find('=');
      size_t colon = text.find(':', eq == std::string::npos ? 0 : eq);
      if (eq == std::string::npos || colon == std::string::npos)
        fail(Errc::ValidationError, "--class needs name=annual_cost:capacity");
      ctl::CostClass cc;
      cc.annual_cost = std::stod(text.substr(eq + 1, colon - eq - 1));
      cc.capacity_units = std::stod(text.substr(colon + 1));
      model.classes[text.substr(0, eq)] = cc;
    }
    auto rendered = report::pricing(model, ctl::base_bundle());
    *ctx.out << rendered.table << "\n" << rendered.csv;
  });

  // ---- scenario
  auto* scenario = app.add_subcommand("scenario", "replay command scripts");
  scenario->require_subcommand(1);
  auto* replay = scenario->add_subcommand("replay", "run a scenario file");
  replay->add_option("file", o.scenario_file, "scenario file: one command line per step")
      ->required();
  replay->callback([&] {
    std::string text = read_text_file(o.scenario_file);
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      size_t first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      auto tokens = tokenize(line);
      std::vector<std::string> step_args = {"--state", ctx.state_path, "--actor", ctx.actor};
      step_args.insert(step_args.end(), tokens.begin(), tokens.end());
      *ctx.out << "$ " << line << "\n";
      int code = run(step_args, *ctx.out, *ctx.out);
      if (code != 0) *ctx.out << "exit: " << code << "\n";
    }
  });

  // ---- serve
  auto* serve = app.add_subcommand("serve", "HTTP facade for the object gateway");
  serve->add_option("--port", o.serve_port, "listen port")->required();
  serve->add_option("--host", o.serve_host, "bind address");
  serve->callback([&] {
    StateLock lock(ctx.state_path);
    auto sim = ctx.load();
    http::FacadeOptions options;
    options.actor = ctx.actor;
    if (ctx.now_given) options.fixed_now = ctx.now;
    Simulation* raw = sim.get();
    options.on_mutation = [raw, &ctx] { ctx.save(*raw); };
    *ctx.err << "serving on " << o.serve_host << ":" << o.serve_port << "\n";
    exit_code = http::serve(*sim, o.serve_host, o.serve_port, options);
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}

}  // namespace wg::cli
