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

#include <random>

#include "doctest.h"
#include "wg/errors.hpp"

using namespace wg;
using namespace wg::ctl;

namespace {

struct Fixture {
  audit::Log log;
  ControlPlane plane{log};
  int64_t clock = 0;

  explicit Fixture(unsigned nodes = 2, unsigned threads = 56, unsigned ram = 256) {
    for (unsigned i = 0; i < nodes; ++i) plane.add_node(threads, ram);
  }

  int64_t tick() { return ++clock; }

  Project& base_project(const std::string& id) {
    return plane.create_project("admin", id, Subscription{}, tick());
  }
};

}  // namespace

TEST_CASE("volume quota counts volumes and snapshots at full size") {
  Fixture f;
  f.base_project("p1");  // 2 TB volume quota

  std::string a = f.plane.create_volume("u", "p1", 3 * (kBytesPerTb / 2), "", f.tick()).id;  // 1.5 TB
  std::string b = f.plane.create_volume("u", "p1", kBytesPerTb / 2, "", f.tick()).id;       // 0.5 TB
  CHECK(f.plane.project_info("p1").usage.volume_bytes == 2 * kBytesPerTb);

  // a 0.5 TB snapshot would take the total to 2.5 TB
  try {
    f.plane.snapshot_volume("u", "p1", b, f.tick());
    FAIL("expected VolumeQuotaExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::VolumeQuotaExceeded);
  }
  CHECK(f.plane.project_info("p1").usage.volume_bytes == 2 * kBytesPerTb);

  SUBCASE("deleting a volume releases its quota") {
    f.plane.delete_volume("u", b, f.tick());
    CHECK(f.plane.project_info("p1").usage.volume_bytes == 3 * (kBytesPerTb / 2));
    try {
      f.plane.snapshot_volume("u", "p1", a, f.tick());  // 1.5 + 1.5 exceeds the 2 TB quota
      FAIL("expected VolumeQuotaExceeded");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::VolumeQuotaExceeded);
    }
  }
}

TEST_CASE("clones are metadata-only but charge full size") {
  Fixture f;
  f.base_project("p1");
  auto& clone =
      f.plane.create_volume("u", "p1", 10ull << 30, "Centos7_dbgap_blessed_desktop", f.tick());
  CHECK(clone.source_image == "Centos7_dbgap_blessed_desktop");
  CHECK(f.plane.project_info("p1").usage.volume_bytes == 10ull << 30);

  try {
    f.plane.create_volume("u", "p1", 1 << 20, "not an image", f.tick());
    FAIL("expected MalformedName");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MalformedName);
  }
}

TEST_CASE("volume in use by a vm cannot be deleted") {
  Fixture f;
  f.base_project("p1");
  auto& vol = f.plane.create_volume("u", "p1", 1ull << 30, "", f.tick());
  f.plane.launch_vm("u", "p1", 4, 8, vol.id, f.tick());
  try {
    f.plane.delete_volume("u", vol.id, f.tick());
    FAIL("expected VolumeInUse");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::VolumeInUse);
  }
}

TEST_CASE("oversubscription arithmetic: 56 threads take seven 16-vcpu vms") {
  Fixture f(2);
  CHECK(f.plane.node_info(0).vcpu_capacity() == 112);
  CHECK(f.plane.total_vcpu_capacity() == 224);

  // seven different projects so the project quota never interferes
  for (int i = 0; i < 7; ++i) {
    f.base_project("p" + std::to_string(i));
    auto& vm = f.plane.launch_vm("u", "p" + std::to_string(i), 16, 8, "", f.tick());
    CHECK(vm.host == 0);  // first fit by ascending node id
  }
  CHECK(f.plane.node_info(0).vcpus_used == 112);

  f.base_project("p7");
  auto& eighth = f.plane.launch_vm("u", "p7", 16, 8, "", f.tick());
  CHECK(eighth.host == 1);  // node 0 is full, spill to the next node

  SUBCASE("single-node cluster exhausts instead") {
    Fixture single(1);
    for (int i = 0; i < 7; ++i) {
      single.base_project("q" + std::to_string(i));
      single.plane.launch_vm("u", "q" + std::to_string(i), 16, 8, "", single.tick());
    }
    single.base_project("q7");
    try {
      single.plane.launch_vm("u", "q7", 16, 8, "", single.tick());
      FAIL("expected CapacityExhausted");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::CapacityExhausted);
    }
  }
}

TEST_CASE("project quota gates before placement") {
  Fixture f;
  f.base_project("p1");
  f.plane.launch_vm("u", "p1", 16, 8, "", f.tick());
  try {
    f.plane.launch_vm("u", "p1", 1, 1, "", f.tick());
    FAIL("expected ProjectQuotaExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ProjectQuotaExceeded);
  }

  SUBCASE("addons widen the quota") {
    f.plane.add_quota_addons("admin", "p1", 2, 0, f.tick());
    CHECK_NOTHROW(f.plane.launch_vm("u", "p1", 2, 4, "", f.tick()));
  }
}

TEST_CASE("ram is sold 1x: the ninth 32 GB vm does not fit a 256 GB node") {
  Fixture f(1, 56, 256);
  for (int i = 0; i < 8; ++i) {
    f.base_project("r" + std::to_string(i));
    auto& vm = f.plane.launch_vm("u", "r" + std::to_string(i), 1, 32, "", f.tick());
    CHECK(vm.host == 0);
  }
  CHECK(f.plane.node_info(0).ram_used_gb == 256);
  f.base_project("r8");
  try {
    f.plane.launch_vm("u", "r8", 1, 32, "", f.tick());
    FAIL("expected CapacityExhausted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::CapacityExhausted);
  }
}

TEST_CASE("drain migrates everything or nothing") {
  Fixture f(2);
  f.base_project("p1");
  auto& vm = f.plane.launch_vm("u", "p1", 16, 32, "", f.tick());
  REQUIRE(vm.host == 0);

  SUBCASE("happy path moves the vm and marks maintenance") {
    auto report = f.plane.drain_node("admin", 0, f.tick());
    REQUIRE(report.moves.size() == 1);
    CHECK(report.moves[0].vm == vm.id);
    CHECK(report.moves[0].from == 0);
    CHECK(report.moves[0].to == 1);
    CHECK(f.plane.vm_info(vm.id).host == 1);
    CHECK(f.plane.node_info(0).maintenance);
    CHECK(f.plane.node_info(0).resident.empty());
    CHECK(f.plane.node_info(1).vcpus_used == 16);
    // project usage is untouched by migration
    CHECK(f.plane.project_info("p1").usage.vcpus == 16);
    f.plane.check_consistency();

    SUBCASE("undrain does not move vms back") {
      f.plane.undrain_node("admin", 0, f.tick());
      CHECK_FALSE(f.plane.node_info(0).maintenance);
      CHECK(f.plane.vm_info(vm.id).host == 1);
      // a new vm can land on node 0 again
      f.base_project("p2");
      auto& vm2 = f.plane.launch_vm("u", "p2", 1, 1, "", f.tick());
      CHECK(vm2.host == 0);
    }
  }

  SUBCASE("no headroom leaves the cluster exactly as it was") {
    // fill node 1 completely so nothing can move there
    for (int i = 0; i < 7; ++i) {
      f.base_project("blk" + std::to_string(i));
      f.plane.launch_vm("u", "blk" + std::to_string(i), 16, 8, "", f.tick());
    }
    // nodes: 0 holds vm (16) + some blockers; drain 0 must fail atomically
    auto nodes_before = f.plane.nodes();
    auto vms_before = f.plane.vms();
    try {
      f.plane.drain_node("admin", 0, f.tick());
      FAIL("expected InsufficientClusterHeadroom");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::InsufficientClusterHeadroom);
    }
    auto nodes_after = f.plane.nodes();
    auto vms_after = f.plane.vms();
    REQUIRE(nodes_before.size() == nodes_after.size());
    for (size_t i = 0; i < nodes_before.size(); ++i) {
      CHECK(nodes_before[i].maintenance == nodes_after[i].maintenance);
      CHECK(nodes_before[i].vcpus_used == nodes_after[i].vcpus_used);
      CHECK(nodes_before[i].ram_used_gb == nodes_after[i].ram_used_gb);
      CHECK(nodes_before[i].resident == nodes_after[i].resident);
    }
    REQUIRE(vms_before.size() == vms_after.size());
    for (size_t i = 0; i < vms_before.size(); ++i)
      CHECK(vms_before[i].host == vms_after[i].host);
  }
}

TEST_CASE("image name grammar") {
  auto name = parse_image_name("Centos7_dbgap_blessed_desktop");
  CHECK(name.distro == "Centos");
  CHECK(name.version == "7");
  CHECK(name.tags == std::vector<std::string>{"dbgap", "blessed", "desktop"});
  CHECK(name.canonical() == "Centos7_dbgap_blessed_desktop");

  auto ubuntu = parse_image_name("Ubuntu16.04_vanilla");
  CHECK(ubuntu.distro == "Ubuntu");
  CHECK(ubuntu.version == "16.04");
  CHECK(ubuntu.tags == std::vector<std::string>{"vanilla"});

  auto debian = parse_image_name("Debian9_dbgap_galaxy");
  CHECK(debian.version == "9");

  for (const char* bad : {"foo", "", "Centos7", "7centos_x", "Centos7_", "Centos7__x",
                          "Centos7_bad tag", "Centos_x", "Centos7.", "Centos7._x"}) {
    try {
      parse_image_name(bad);
      FAIL("expected MalformedName for ", bad);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::MalformedName);
    }
  }

  SUBCASE("parse then print is the identity on valid names") {
    std::mt19937_64 rng(5);
    const std::string distros[] = {"Centos", "Debian", "Ubuntu", "Rocky"};
    const std::string versions[] = {"7", "9", "16.04", "22.04.1"};
    const std::string tags[] = {"vanilla", "dbgap", "blessed", "desktop", "galaxy", "x11"};
    for (int i = 0; i < 50; ++i) {
      std::string s = distros[rng() % 4] + versions[rng() % 4];
      unsigned n = 1 + unsigned(rng() % 3);
      for (unsigned t = 0; t < n; ++t) s += "_" + tags[rng() % 6];
      auto parsed = parse_image_name(s);
      CHECK(parsed.canonical() == s);
    }
  }
}

TEST_CASE("cost recovery pricing") {
  CostModel model = example_cost_model();

  SUBCASE("the documented example prices as hand-computed") {
    CHECK(unit_price(model, "vcpu") == doctest::Approx(52.5210084).epsilon(1e-6));
    double base = price_bundle(model, base_bundle());
    CHECK(base == doctest::Approx(840.3361345 + 117.6470588).epsilon(1e-6));
    CHECK(base < 1000.0);  // the base bundle stays under a thousand a year
  }

  SUBCASE("selling the recovery fraction of every class returns the cost") {
    CHECK(revenue_at_recovery(model) ==
          doctest::Approx(total_annual_cost(model)).epsilon(1e-9));
  }

  SUBCASE("zero capacity is an error") {
    model.classes["weird"] = {1000.0, 0.0};
    try {
      unit_price(model, "weird");
      FAIL("expected ZeroCapacity");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ZeroCapacity);
    }
  }
}

TEST_CASE("control plane mutations audit exactly once") {
  Fixture f;
  size_t n = f.log.size();
  f.base_project("p1");
  CHECK(f.log.size() == n + 1);
  auto& vol = f.plane.create_volume("u", "p1", 1 << 20, "", f.tick());
  CHECK(f.log.size() == n + 2);
  f.plane.snapshot_volume("u", "p1", vol.id, f.tick());
  CHECK(f.log.size() == n + 3);
  auto& vm = f.plane.launch_vm("u", "p1", 2, 2, "", f.tick());
  CHECK(f.log.size() == n + 4);
  f.plane.drain_node("admin", vm.host, f.tick());
  CHECK(f.log.size() == n + 5);
  f.plane.terminate_vm("u", vm.id, f.tick());
  CHECK(f.log.size() == n + 6);
  f.plane.add_quota_addons("admin", "p1", 1, 1, f.tick());
  CHECK(f.log.size() == n + 7);
  CHECK(f.log.at(n + 6).action == "quota-change");
  // failed attempts mutate nothing and log nothing
  try {
    f.plane.launch_vm("u", "p1", 1000, 1, "", f.tick());
  } catch (const Error&) {
  }
  CHECK(f.log.size() == n + 7);
}

TEST_CASE("randomized operations never violate quotas or drift usage") {
  Fixture f(4, 16, 64);
  std::mt19937_64 rng(99);
  std::vector<std::string> projects;
  for (int i = 0; i < 3; ++i) {
    std::string id = "p" + std::to_string(i);
    f.base_project(id);
    projects.push_back(id);
  }
  std::vector<std::string> volumes, vms;
  int64_t now = f.clock + 100;
  for (int step = 0; step < 2000; ++step) {
    const std::string& project = projects[rng() % projects.size()];
    switch (rng() % 6) {
      case 0:
        try {
          volumes.push_back(
              f.plane.create_volume("u", project, (1 + rng() % 400) << 30, "", ++now).id);
        } catch (const Error&) {
        }
        break;
      case 1:
        if (!volumes.empty()) {
          try {
            vms.push_back(f.plane
                              .launch_vm("u", project, 1 + unsigned(rng() % 8),
                                         1 + unsigned(rng() % 16), "", ++now)
                              .id);
          } catch (const Error&) {
          }
        }
        break;
      case 2:
        if (!volumes.empty()) {
          try {
            f.plane.snapshot_volume("u", project, volumes[rng() % volumes.size()], ++now);
          } catch (const Error&) {
          }
        }
        break;
      case 3:
        if (!vms.empty()) {
          size_t pick = rng() % vms.size();
          try {
            f.plane.terminate_vm("u", vms[pick], ++now);
            vms.erase(vms.begin() + long(pick));
          } catch (const Error&) {
          }
        }
        break;
      case 4:
        if (!volumes.empty()) {
          size_t pick = rng() % volumes.size();
          try {
            f.plane.delete_volume("u", volumes[pick], ++now);
            volumes.erase(volumes.begin() + long(pick));
          } catch (const Error&) {
          }
        }
        break;
      case 5: {
        uint32_t node = uint32_t(rng() % 4);
        try {
          if (rng() % 2)
            f.plane.drain_node("admin", node, ++now);
          else
            f.plane.undrain_node("admin", node, ++now);
        } catch (const Error&) {
        }
        break;
      }
    }
    if (step % 100 == 0) f.plane.check_consistency();
  }
  f.plane.check_consistency();
  CHECK(f.log.verify() == std::nullopt);
}
