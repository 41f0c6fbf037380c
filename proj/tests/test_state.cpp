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

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "wg/errors.hpp"
#include "wg/lifecycle.hpp"

using namespace wg;
namespace fs = std::filesystem;

namespace {

constexpr uint64_t kMiB = 1ull << 20;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("wgstate-" + std::to_string(::getpid()) + "-" + std::to_string(counter()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int counter() {
    static int n = 0;
    return n++;
  }
};

std::unique_ptr<Simulation> populated_sim() {
  auto sim = std::make_unique<Simulation>(42);
  ClusterLayout layout;
  layout.osds = 8;
  layout.osd_capacity_bytes = 1024 * kMiB;
  layout.block_quota_bytes = 16 * kMiB;
  layout.cache_quota_bytes = 64 * kMiB;
  layout.secure_quota_bytes = 64 * kMiB;
  layout.general_quota_bytes = 16 * kMiB;
  sim->init_cluster(layout);
  ctl::Subscription dbgap;
  dbgap.dbgap_approved = true;
  sim->control.create_project("admin", "lab", dbgap, 10);
  sim->assign_project_subnet("lab");
  sim->gateway.create_bucket("alice", "lab", "vault", gateway::Tier::S3Secure, 8 * kMiB, 20);
  std::vector<uint8_t> payload;
  for (int i = 0; i < 5000; ++i) payload.push_back(uint8_t(i * 7));
  sim->gateway.put_object("alice", gateway::Tier::S3Secure, "vault", "enc", payload,
                          std::string("sekrit"), 30);
  sim->gateway.put_object("alice", gateway::Tier::S3Secure, "vault", "plain", payload,
                          std::nullopt, 31);
  auto vol = sim->control.create_volume("alice", "lab", 1ull << 30, "", 40);
  sim->control.launch_vm("alice", "lab", 4, 8, vol.id, 50);
  sim->rules.push_back({"lab", 443, netpolicy::RuleScope::Campus, "web"});
  sim->cluster.fail_osd(7);
  return sim;
}

}  // namespace

TEST_CASE("serialize then deserialize is the identity") {
  auto sim = populated_sim();
  std::string blob = state::serialize(*sim);
  std::string audit_lines = sim->audit.to_lines();
  auto back = state::deserialize(blob, audit_lines);
  CHECK(state::serialize(*back) == blob);
  CHECK(back->audit.to_lines() == audit_lines);
  CHECK(back->audit.verify() == std::nullopt);

  // behavior carries over: encrypted reads still gate on the key
  auto payload = back->gateway.get_object("alice", gateway::Tier::S3Secure, "vault", "enc",
                                          std::string("sekrit"), 100);
  CHECK(payload.size() == 5000);
  CHECK_THROWS_AS(back->gateway.get_object("alice", gateway::Tier::S3Secure, "vault", "enc",
                                           std::string("wrong"), 101),
                  Error);
  CHECK_FALSE(back->cluster.osd(7).up);
  CHECK(back->rules.size() == 1);
}

TEST_CASE("save and load files, atomically") {
  TempDir dir;
  auto sim = populated_sim();
  fs::path file = dir.path / "state.json";
  state::save(*sim, file);
  CHECK(fs::exists(file));
  CHECK(fs::exists(state::audit_path_for(file)));
  CHECK_FALSE(fs::exists(dir.path / "state.json.tmp"));

  auto loaded = state::load(file);
  CHECK(state::serialize(*loaded) == state::serialize(*sim));

  SUBCASE("second save keeps the file loadable and identical") {
    state::save(*loaded, file);
    auto again = state::load(file);
    CHECK(state::serialize(*again) == state::serialize(*sim));
  }

  SUBCASE("a crash leaving extra audit lines is tolerated") {
    // simulate audit flushed but state rename lost: append one more line
    auto extra = sim->audit.entries().back();
    std::ofstream out(state::audit_path_for(file), std::ios::app);
    extra.seq += 1;
    out << audit::entry_line(extra) << "\n";
    out.close();
    auto recovered = state::load(file);
    CHECK(recovered->audit.size() == sim->audit.size());  // truncated to the state's record
    CHECK(recovered->audit.verify() == std::nullopt);
  }

  SUBCASE("a shorter audit file than recorded is an error") {
    std::ofstream out(state::audit_path_for(file), std::ios::trunc);
    out.close();
    CHECK_THROWS_AS(state::load(file), Error);
  }
}

TEST_CASE("unknown future versions are rejected clearly") {
  auto sim = std::make_unique<Simulation>(1);
  std::string blob = state::serialize(*sim);
  auto pos = blob.find("\"version\": 1");
  REQUIRE(pos != std::string::npos);
  blob.replace(pos, 12, "\"version\": 2");
  try {
    state::deserialize(blob, "");
    FAIL("expected StateVersionUnsupported");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::StateVersionUnsupported);
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("missing or corrupt state files produce named errors") {
  TempDir dir;
  CHECK_THROWS_AS(state::load(dir.path / "nope.json"), Error);
  fs::path garbled = dir.path / "bad.json";
  std::ofstream(garbled) << "{ not json";
  CHECK_THROWS_AS(state::load(garbled), Error);
}
