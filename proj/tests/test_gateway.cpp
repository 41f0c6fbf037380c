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

#include "wg/gateway.hpp"

#include <algorithm>
#include <cstring>

#include "doctest.h"
#include "wg/errors.hpp"
#include "wg/sim.hpp"

using namespace wg;
using gateway::Tier;

namespace {

constexpr uint64_t kMiB = 1ull << 20;

struct Fixture {
  Simulation sim{7};

  Fixture() {
    ClusterLayout layout;
    layout.osds = 8;
    layout.osd_capacity_bytes = 4096 * kMiB;
    layout.block_quota_bytes = 64 * kMiB;
    layout.cache_quota_bytes = 512 * kMiB;
    layout.secure_quota_bytes = 512 * kMiB;
    layout.general_quota_bytes = 64 * kMiB;
    sim.init_cluster(layout);
    ctl::Subscription dbgap;
    dbgap.dbgap_approved = true;
    sim.control.create_project("admin", "genomics", dbgap, 1);
    sim.control.create_project("admin", "plain", {}, 1);
  }
};

std::vector<uint8_t> bytes_of(std::string_view text) {
  return std::vector<uint8_t>(text.begin(), text.end());
}

}  // namespace

TEST_CASE("bucket names follow the 3-63 lowercase grammar") {
  CHECK(gateway::valid_bucket_name("abc"));
  CHECK(gateway::valid_bucket_name("my-data-2"));
  CHECK_FALSE(gateway::valid_bucket_name("AB"));
  CHECK_FALSE(gateway::valid_bucket_name("ab"));
  CHECK_FALSE(gateway::valid_bucket_name("Caps"));
  CHECK_FALSE(gateway::valid_bucket_name("-abc"));
  CHECK_FALSE(gateway::valid_bucket_name("abc-"));
  CHECK_FALSE(gateway::valid_bucket_name("a_b"));
  CHECK_FALSE(gateway::valid_bucket_name(std::string(64, 'a')));
  CHECK(gateway::valid_bucket_name(std::string(63, 'a')));
}

TEST_CASE("bucket creation authorization") {
  Fixture f;
  CHECK_NOTHROW(f.sim.gateway.create_bucket("alice", "genomics", "cache-a", Tier::S3Cache,
                                            64 * kMiB, 100));
  // cache buckets get the 60-day default policy at creation
  CHECK(f.sim.gateway.bucket_info(Tier::S3Cache, "cache-a").lifecycle->expiration_days == 60.0);

  try {
    f.sim.gateway.create_bucket("bob", "plain", "secure-b", Tier::S3Secure, kMiB, 101);
    FAIL("expected TierForbidden");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TierForbidden);
  }
  // the general tier is open to every project
  CHECK_NOTHROW(
      f.sim.gateway.create_bucket("bob", "plain", "open-data", Tier::S3General, kMiB, 102));

  try {
    f.sim.gateway.create_bucket("alice", "genomics", "AB", Tier::S3Cache, kMiB, 103);
    FAIL("expected InvalidName");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidName);
  }

  try {
    f.sim.gateway.create_bucket("alice", "genomics", "cache-a", Tier::S3Cache, kMiB, 104);
    FAIL("expected NameTaken");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NameTaken);
  }
  // same name in a different tier is fine: uniqueness is per tier
  CHECK_NOTHROW(
      f.sim.gateway.create_bucket("alice", "genomics", "cache-a", Tier::S3Secure, kMiB, 105));
}

TEST_CASE("puts route to the tier pool and amplify as configured") {
  Fixture f;
  f.sim.gateway.create_bucket("alice", "genomics", "archive", Tier::S3Secure, 16 * kMiB, 100);
  auto payload = bytes_of(std::string(kMiB, 'z'));
  f.sim.gateway.put_object("alice", Tier::S3Secure, "archive", "run/1.bam", payload,
                           std::nullopt, 200);

  auto acct = f.sim.cluster.accounting("s3secure");
  CHECK(acct.logical_bytes == kMiB);
  CHECK(acct.backend_bytes == kMiB * 3 / 2);  // 4:2 writes 1.5 MB per MB
  // tier routing: the object lives in the secure pool and nowhere else
  CHECK(f.sim.cluster.has_object("s3secure", "archive/run/1.bam"));
  CHECK(f.sim.cluster.accounting("s3cache").backend_bytes == 0);
  CHECK(f.sim.cluster.accounting("s3general").backend_bytes == 0);
}

TEST_CASE("bucket quota arithmetic") {
  Fixture f;
  f.sim.gateway.create_bucket("alice", "genomics", "cache", Tier::S3Cache, 1000, 100);
  f.sim.gateway.put_object("alice", Tier::S3Cache, "cache", "a", bytes_of(std::string(700, 'x')),
                           std::nullopt, 200);
  try {
    f.sim.gateway.put_object("alice", Tier::S3Cache, "cache", "b",
                             bytes_of(std::string(400, 'y')), std::nullopt, 201);
    FAIL("expected BucketQuotaExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BucketQuotaExceeded);
  }
  CHECK(f.sim.gateway.bucket_info(Tier::S3Cache, "cache").usage_bytes == 700);

  // overwrite charges the delta, not the sum
  f.sim.gateway.put_object("alice", Tier::S3Cache, "cache", "a", bytes_of(std::string(900, 'x')),
                           std::nullopt, 202);
  CHECK(f.sim.gateway.bucket_info(Tier::S3Cache, "cache").usage_bytes == 900);

  // usage equals the sum of live object sizes
  uint64_t sum = 0;
  for (const auto& [key, meta] : f.sim.gateway.bucket_info(Tier::S3Cache, "cache").objects) {
    (void)key;
    sum += meta.size;
  }
  CHECK(sum == 900);
}

TEST_CASE("sse-c encryption") {
  Fixture f;
  f.sim.gateway.create_bucket("alice", "genomics", "vault", Tier::S3Secure, 16 * kMiB, 100);
  const std::string marker = "THE-64-BYTE-CANARY-MARKER-0123456789abcdef-END-OF-MARKER-LINE!!!";
  REQUIRE(marker.size() == 64);
  std::string body = "header " + marker + " trailer";
  auto payload = bytes_of(body);

  SUBCASE("round trip with the right key") {
    f.sim.gateway.put_object("alice", Tier::S3Secure, "vault", "enc", payload,
                             std::string("hunter2"), 200);
    auto back =
        f.sim.gateway.get_object("alice", Tier::S3Secure, "vault", "enc",
                                 std::string("hunter2"), 201);
    CHECK(back == payload);
  }

  SUBCASE("the plaintext marker never reaches the storage plane") {
    f.sim.gateway.put_object("alice", Tier::S3Secure, "vault", "enc", payload,
                             std::string("hunter2"), 200);
    for (uint32_t id : f.sim.cluster.osd_ids()) {
      for (const auto& [key, bytes] : f.sim.cluster.osd(id).shards) {
        (void)key;
        auto it = std::search(bytes.begin(), bytes.end(), marker.begin(), marker.end());
        CHECK(it == bytes.end());
      }
    }
    // control: an unencrypted put does land the marker in shard bytes
    // (replication keeps whole copies, so the scan sees the plaintext)
    f.sim.cluster.create_pool(
        {"scratch", poolstore::Redundancy::replicated(3), 16 * kMiB, poolstore::PoolRole::Block});
    f.sim.cluster.write_object("scratch", "plain", payload);
    bool marker_seen = false;
    for (uint32_t id : f.sim.cluster.osd_ids())
      for (const auto& [key, bytes] : f.sim.cluster.osd(id).shards) {
        if (key.find("scratch") != 0) continue;
        if (std::search(bytes.begin(), bytes.end(), marker.begin(), marker.end()) != bytes.end())
          marker_seen = true;
      }
    CHECK(marker_seen);
  }

  SUBCASE("wrong key is rejected by fingerprint, not by decryption") {
    f.sim.gateway.put_object("alice", Tier::S3Secure, "vault", "enc", payload,
                             std::string("hunter2"), 200);
    try {
      f.sim.gateway.get_object("alice", Tier::S3Secure, "vault", "enc",
                               std::string("hunter3"), 201);
      FAIL("expected KeyMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::KeyMismatch);  // AuthFailure would mean decryption ran
    }
    try {
      f.sim.gateway.get_object("alice", Tier::S3Secure, "vault", "enc", std::nullopt, 202);
      FAIL("expected KeyRequired");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::KeyRequired);
    }
  }

  SUBCASE("unencrypted object needs no key") {
    f.sim.gateway.put_object("alice", Tier::S3Secure, "vault", "plain", payload, std::nullopt,
                             200);
    CHECK(f.sim.gateway.get_object("alice", Tier::S3Secure, "vault", "plain", std::nullopt,
                                   201) == payload);
  }
}

TEST_CASE("delete and list") {
  Fixture f;
  f.sim.gateway.create_bucket("alice", "genomics", "data", Tier::S3Cache, 16 * kMiB, 100);
  for (const char* key : {"a/1", "a/2", "b/1", "b/2", "c"})
    f.sim.gateway.put_object("alice", Tier::S3Cache, "data", key, bytes_of("x"), std::nullopt,
                             200);

  SUBCASE("delete frees usage and the key disappears") {
    uint64_t freed = f.sim.gateway.delete_object("alice", Tier::S3Cache, "data", "c", 300);
    CHECK(freed == 1);
    CHECK_FALSE(f.sim.cluster.has_object("s3cache", "data/c"));
    try {
      f.sim.gateway.get_object("alice", Tier::S3Cache, "data", "c", std::nullopt, 301);
      FAIL("expected NoSuchKey");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NoSuchKey);
    }
    try {
      f.sim.gateway.delete_object("alice", Tier::S3Cache, "data", "c", 302);
      FAIL("expected NoSuchKey");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NoSuchKey);
    }
  }

  SUBCASE("prefix filter is lexicographic") {
    auto page = f.sim.gateway.list_objects(Tier::S3Cache, "data", "a/", 100, std::nullopt);
    REQUIRE(page.items.size() == 2);
    CHECK(page.items[0].key == "a/1");
    CHECK(page.items[1].key == "a/2");
    CHECK_FALSE(page.continuation.has_value());
  }

  SUBCASE("pagination pages are disjoint and their union is complete") {
    std::vector<std::string> seen;
    std::optional<std::string> cont;
    int pages = 0;
    do {
      auto page = f.sim.gateway.list_objects(Tier::S3Cache, "data", "", 2, cont);
      for (const auto& meta : page.items) seen.push_back(meta.key);
      cont = page.continuation;
      ++pages;
    } while (cont);
    CHECK(pages == 3);
    CHECK(seen == std::vector<std::string>{"a/1", "a/2", "b/1", "b/2", "c"});
    std::set<std::string> unique(seen.begin(), seen.end());
    CHECK(unique.size() == seen.size());
  }

  SUBCASE("listing an empty bucket yields an empty page") {
    f.sim.gateway.create_bucket("alice", "genomics", "void", Tier::S3Cache, kMiB, 400);
    auto page = f.sim.gateway.list_objects(Tier::S3Cache, "void", "", 10, std::nullopt);
    CHECK(page.items.empty());
    CHECK_FALSE(page.continuation.has_value());
  }
}

TEST_CASE("lifecycle attachment rules") {
  Fixture f;
  f.sim.gateway.create_bucket("alice", "genomics", "cache", Tier::S3Cache, kMiB, 100);
  f.sim.gateway.create_bucket("alice", "genomics", "keep", Tier::S3Secure, kMiB, 100);

  CHECK_NOTHROW(f.sim.gateway.set_lifecycle("alice", Tier::S3Cache, "cache",
                                            gateway::LifecyclePolicy{30.0}, 200));
  CHECK(f.sim.gateway.bucket_info(Tier::S3Cache, "cache").lifecycle->expiration_days == 30.0);

  try {
    f.sim.gateway.set_lifecycle("alice", Tier::S3Secure, "keep", gateway::LifecyclePolicy{60.0},
                                201);
    FAIL("expected TierForbidden");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TierForbidden);
  }
  try {
    f.sim.gateway.set_lifecycle("alice", Tier::S3Cache, "cache", gateway::LifecyclePolicy{0.0},
                                202);
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ValidationError);
  }
}

TEST_CASE("every object operation appends exactly one audit entry") {
  Fixture f;
  size_t base = f.sim.audit.size();
  f.sim.gateway.create_bucket("alice", "genomics", "data", Tier::S3Cache, kMiB, 100);
  CHECK(f.sim.audit.size() == base + 1);
  f.sim.gateway.put_object("alice", Tier::S3Cache, "data", "k", bytes_of("v"), std::nullopt,
                           101);
  CHECK(f.sim.audit.size() == base + 2);
  f.sim.gateway.get_object("alice", Tier::S3Cache, "data", "k", std::nullopt, 102);
  CHECK(f.sim.audit.size() == base + 3);
  f.sim.gateway.delete_object("alice", Tier::S3Cache, "data", "k", 103);
  CHECK(f.sim.audit.size() == base + 4);
  // failed attempts are logged too, with outcome=error
  try {
    f.sim.gateway.get_object("alice", Tier::S3Cache, "data", "k", std::nullopt, 104);
  } catch (const Error&) {
  }
  CHECK(f.sim.audit.size() == base + 5);
  CHECK(f.sim.audit.at(base + 4).outcome == audit::Outcome::Error);
  CHECK(f.sim.audit.verify() == std::nullopt);
}

TEST_CASE("bucket name resolution for the http facade prefers cache then secure") {
  Fixture f;
  f.sim.gateway.create_bucket("alice", "genomics", "same", Tier::S3Secure, kMiB, 100);
  CHECK(*f.sim.gateway.resolve_tier_by_name("same") == Tier::S3Secure);
  f.sim.gateway.create_bucket("alice", "genomics", "same", Tier::S3Cache, kMiB, 101);
  CHECK(*f.sim.gateway.resolve_tier_by_name("same") == Tier::S3Cache);
  CHECK_FALSE(f.sim.gateway.resolve_tier_by_name("absent").has_value());
}
