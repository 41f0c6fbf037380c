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

#include "wg/poolstore.hpp"

#include <random>
#include <set>

#include "doctest.h"
#include "wg/errors.hpp"

using namespace wg;
using namespace wg::poolstore;

namespace {

constexpr uint64_t kOsdCap = 1ull << 30;

Cluster make_cluster(unsigned osds, uint64_t capacity = kOsdCap) {
  Cluster cluster;
  for (unsigned i = 0; i < osds; ++i) cluster.add_osd(capacity);
  return cluster;
}

std::vector<uint8_t> random_payload(size_t size, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<uint8_t> payload(size);
  for (auto& b : payload) b = uint8_t(rng());
  return payload;
}

// Independent rendezvous oracle: re-derives the published score function
// (fnv1a64 over "pool\x1fobject\x1findex\x1fosd", splitmix64 finalizer) and
// replays the greedy per-index selection.
uint64_t oracle_fnv(const std::string& text) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t oracle_mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t oracle_score(const std::string& pool, const std::string& object, uint32_t index,
                      uint32_t osd) {
  std::string material = pool;
  material += '\x1f';
  material += object;
  material += '\x1f';
  material += std::to_string(index);
  material += '\x1f';
  material += std::to_string(osd);
  return oracle_mix(oracle_fnv(material));
}

std::vector<uint32_t> oracle_place(const std::string& pool, const std::string& object,
                                   unsigned width, const std::vector<uint32_t>& up) {
  std::set<uint32_t> used;
  std::vector<uint32_t> out;
  for (unsigned index = 0; index < width; ++index) {
    bool have = false;
    uint64_t best_score = 0;
    uint32_t best = 0;
    for (uint32_t osd : up) {
      if (used.count(osd)) continue;
      uint64_t s = oracle_score(pool, object, index, osd);
      if (!have || s > best_score || (s == best_score && osd < best)) {
        have = true;
        best_score = s;
        best = osd;
      }
    }
    used.insert(best);
    out.push_back(best);
  }
  return out;
}

}  // namespace

TEST_CASE("create_pool width and name rules") {
  auto c8 = make_cluster(8);
  CHECK_NOTHROW(c8.create_pool({"rep3", Redundancy::replicated(3), 1 << 20, PoolRole::Block}));
  CHECK_NOTHROW(
      c8.create_pool({"ec42", Redundancy::erasure_coded(4, 2), 1 << 20, PoolRole::S3Secure}));
  CHECK_THROWS_AS(
      c8.create_pool({"rep3", Redundancy::replicated(3), 1 << 20, PoolRole::Block}), Error);

  auto c5 = make_cluster(5);
  try {
    c5.create_pool({"ec42", Redundancy::erasure_coded(4, 2), 1 << 20, PoolRole::S3Secure});
    FAIL("expected InsufficientOsds");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InsufficientOsds);
  }
}

TEST_CASE("pool quotas bounded by raw capacity over worst amplification") {
  auto cluster = make_cluster(8, 100);  // 800 raw bytes total
  // at 3x amplification, at most 266 logical bytes are honest to promise
  CHECK_THROWS_AS(
      cluster.create_pool({"big", Redundancy::replicated(3), 300, PoolRole::Block}), Error);
  CHECK_NOTHROW(cluster.create_pool({"ok", Redundancy::replicated(3), 200, PoolRole::Block}));
  // a second pool pushing the sum over the cap is refused too
  CHECK_THROWS_AS(
      cluster.create_pool({"more", Redundancy::erasure_coded(4, 2), 100, PoolRole::S3Cache}),
      Error);
}

TEST_CASE("place_shards determinism and distinctness") {
  auto cluster = make_cluster(8);
  cluster.create_pool({"p", Redundancy::erasure_coded(4, 2), 1 << 20, PoolRole::S3Cache});
  auto a = cluster.place_shards("p", "some-object", 6);
  auto b = cluster.place_shards("p", "some-object", 6);
  CHECK(a.locations == b.locations);
  std::set<uint32_t> osds;
  for (const auto& loc : a.locations) osds.insert(loc.osd_id);
  CHECK(osds.size() == 6);
  for (size_t i = 0; i < a.locations.size(); ++i) CHECK(a.locations[i].shard_index == i);
  CHECK_THROWS_AS(cluster.place_shards("p", "x", 9), Error);
}

TEST_CASE("placement matches the rendezvous oracle and keeps survivors in place") {
  // Fixture found by enumerating oracle scores: object "obj5" on pool
  // "fixture" over OSDs {0,1,2,3} places [3,1,0]; for every single failure
  // among the chosen OSDs the survivors keep their shard indices.
  auto cluster = make_cluster(4);
  cluster.create_pool({"fixture", Redundancy::replicated(3), 1 << 20, PoolRole::Block});

  auto base = cluster.place_shards("fixture", "obj5", 3);
  auto expect = oracle_place("fixture", "obj5", 3, {0, 1, 2, 3});
  REQUIRE(base.locations.size() == 3);
  for (size_t i = 0; i < 3; ++i) CHECK(base.locations[i].osd_id == expect[i]);
  CHECK(expect == std::vector<uint32_t>{3, 1, 0});

  for (size_t failed_index = 0; failed_index < 3; ++failed_index) {
    uint32_t failed = base.locations[failed_index].osd_id;
    cluster.fail_osd(failed);
    std::vector<uint32_t> up;
    for (uint32_t id : {0, 1, 2, 3})
      if (id != failed) up.push_back(id);
    auto after = cluster.place_shards("fixture", "obj5", 3);
    auto oracle_after = oracle_place("fixture", "obj5", 3, up);
    for (size_t i = 0; i < 3; ++i) {
      CHECK(after.locations[i].osd_id == oracle_after[i]);
      if (i != failed_index) CHECK(after.locations[i].osd_id == base.locations[i].osd_id);
    }
    CHECK(after.locations[failed_index].osd_id != failed);
    cluster.revive_osd(failed);
  }
}

TEST_CASE("write accounting is exact") {
  auto cluster = make_cluster(8, 64ull << 20);
  cluster.create_pool({"rep3", Redundancy::replicated(3), 32ull << 20, PoolRole::Block});
  cluster.create_pool({"ec42", Redundancy::erasure_coded(4, 2), 32ull << 20, PoolRole::S3Cache});

  auto payload = random_payload(1000000, 1);
  auto [rep_stripe, rep_backend] = cluster.write_object("rep3", "obj", payload);
  CHECK(rep_backend == 3000000);
  CHECK(rep_stripe.locations.size() == 3);

  auto [ec_stripe, ec_backend] = cluster.write_object("ec42", "obj", payload);
  CHECK(ec_backend == 1500000);  // 6 shards of 250000
  CHECK(ec_stripe.shard_size == 250000);
  CHECK(ec_stripe.locations.size() == 6);

  SUBCASE("empty payload stores zero-length shards") {
    auto [stripe, backend] = cluster.write_object("rep3", "empty", {});
    CHECK(backend == 0);
    CHECK(stripe.locations.size() == 3);
    CHECK(cluster.read_object("rep3", "empty").empty());
  }

  SUBCASE("padding extreme: one byte at 4:2 costs six backend bytes") {
    auto [stripe, backend] =
        cluster.write_object("ec42", "tiny", std::vector<uint8_t>{42});
    CHECK(backend == 6);
    CHECK(stripe.shard_size == 1);
    auto acct_before = cluster.accounting("ec42");
    (void)acct_before;
    Cluster fresh = make_cluster(8);
    fresh.create_pool({"one", Redundancy::erasure_coded(4, 2), 1 << 20, PoolRole::S3Cache});
    fresh.write_object("one", "tiny", std::vector<uint8_t>{42});
    CHECK(fresh.accounting("one").amplification == doctest::Approx(6.0));
  }
}

TEST_CASE("accounting amplification anchors") {
  auto cluster = make_cluster(8, 1ull << 30);
  cluster.create_pool({"rep3", Redundancy::replicated(3), 256ull << 20, PoolRole::Block});
  cluster.create_pool({"ec42", Redundancy::erasure_coded(4, 2), 64ull << 20, PoolRole::S3Cache});
  for (int i = 0; i < 10; ++i)
    cluster.write_object("rep3", "o" + std::to_string(i), random_payload(10 << 20, i));
  auto rep = cluster.accounting("rep3");
  CHECK(rep.logical_bytes == 10ull * (10 << 20));
  CHECK(rep.amplification == 3.0);  // exact

  for (int i = 0; i < 5; ++i)
    cluster.write_object("ec42", "o" + std::to_string(i), random_payload(1 << 20, 100 + i));
  auto ec = cluster.accounting("ec42");
  CHECK(ec.amplification == 1.5);  // k-aligned sizes, exact

  CHECK(cluster.accounting("rep3").backend_bytes == 30ull * (10 << 20));
  auto empty_cluster = make_cluster(8);
  empty_cluster.create_pool({"p", Redundancy::replicated(3), 1 << 20, PoolRole::Block});
  CHECK(empty_cluster.accounting("p").amplification == 0.0);
}

TEST_CASE("read survives allowed failures") {
  auto cluster = make_cluster(8, 64ull << 20);
  cluster.create_pool({"ec42", Redundancy::erasure_coded(4, 2), 32ull << 20, PoolRole::S3Cache});
  cluster.create_pool({"rep3", Redundancy::replicated(3), 32ull << 20, PoolRole::Block});
  auto payload = random_payload(123457, 7);  // deliberately not k-aligned
  auto [stripe, backend] = cluster.write_object("ec42", "obj", payload);
  (void)backend;

  SUBCASE("any two holders down still reconstructs") {
    for (size_t a = 0; a < stripe.locations.size(); ++a)
      for (size_t b = a + 1; b < stripe.locations.size(); ++b) {
        cluster.fail_osd(stripe.locations[a].osd_id);
        cluster.fail_osd(stripe.locations[b].osd_id);
        CHECK(cluster.read_object("ec42", "obj") == payload);
        cluster.revive_osd(stripe.locations[a].osd_id);
        cluster.revive_osd(stripe.locations[b].osd_id);
      }
  }

  SUBCASE("three holders down is unrecoverable") {
    for (size_t i = 0; i < 3; ++i) cluster.fail_osd(stripe.locations[i].osd_id);
    try {
      cluster.read_object("ec42", "obj");
      FAIL("expected Unrecoverable");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::Unrecoverable);
    }
  }

  SUBCASE("replicated read with two copies down") {
    auto [rep_stripe, rb] = cluster.write_object("rep3", "robj", payload);
    (void)rb;
    cluster.fail_osd(rep_stripe.locations[0].osd_id);
    cluster.fail_osd(rep_stripe.locations[1].osd_id);
    CHECK(cluster.read_object("rep3", "robj") == payload);
  }

  SUBCASE("missing object") {
    try {
      cluster.read_object("ec42", "nope");
      FAIL("expected ObjectNotFound");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ObjectNotFound);
    }
  }
}

TEST_CASE("pool quota is enforced and usage stays consistent") {
  auto cluster = make_cluster(8);
  cluster.create_pool({"p", Redundancy::replicated(3), 1000, PoolRole::Block});
  cluster.write_object("p", "a", random_payload(600, 1));
  try {
    cluster.write_object("p", "b", random_payload(500, 2));
    FAIL("expected PoolQuotaExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::PoolQuotaExceeded);
  }
  CHECK(cluster.accounting("p").logical_bytes == 600);

  SUBCASE("overwrite replaces usage, not adds") {
    cluster.write_object("p", "a", random_payload(900, 3));
    CHECK(cluster.accounting("p").logical_bytes == 900);
    CHECK(cluster.read_object("p", "a") == random_payload(900, 3));
  }

  SUBCASE("remove frees usage and shards") {
    CHECK(cluster.remove_object("p", "a") == 600);
    CHECK(cluster.accounting("p").logical_bytes == 0);
    for (uint32_t id : cluster.osd_ids()) CHECK(cluster.osd(id).shards.empty());
  }
}

TEST_CASE("repair rebuilds lost shards onto fresh osds") {
  auto cluster = make_cluster(8, 64ull << 20);
  cluster.create_pool({"ec42", Redundancy::erasure_coded(4, 2), 32ull << 20, PoolRole::S3Cache});
  std::vector<std::vector<uint8_t>> payloads;
  for (int i = 0; i < 12; ++i) {
    payloads.push_back(random_payload(4096 + i * 13, 50 + i));
    cluster.write_object("ec42", "obj" + std::to_string(i), payloads.back());
  }
  uint64_t backend_before = cluster.accounting("ec42").backend_bytes;

  cluster.fail_osd(0);
  auto report = cluster.repair("ec42");
  CHECK(report.stripes_unrecoverable == 0);

  // every stripe is at full width on up OSDs, none on osd 0
  const auto& pool = cluster.pool("ec42");
  for (const auto& [id, stripe] : pool.objects()) {
    (void)id;
    CHECK(stripe.locations.size() == 6);
    for (const auto& loc : stripe.locations) {
      CHECK(loc.osd_id != 0);
      CHECK(cluster.osd(loc.osd_id).up);
    }
  }
  CHECK(cluster.accounting("ec42").backend_bytes == backend_before);
  CHECK(cluster.osd(0).shards.empty());
  for (int i = 0; i < 12; ++i)
    CHECK(cluster.read_object("ec42", "obj" + std::to_string(i)) == payloads[i]);

  SUBCASE("repair is idempotent") {
    auto second = cluster.repair("ec42");
    CHECK(second.rows.empty());
    CHECK(second.bytes_rebuilt == 0);
  }

  SUBCASE("three losses on one stripe are reported unrecoverable") {
    auto stripe = pool.objects().at("obj0");
    cluster.fail_osd(stripe.locations[0].osd_id);
    cluster.fail_osd(stripe.locations[1].osd_id);
    cluster.fail_osd(stripe.locations[2].osd_id);
    auto r = cluster.repair("ec42");
    CHECK(r.stripes_unrecoverable >= 1);
    bool found = false;
    for (const auto& row : r.rows)
      if (row.object_id == "obj0") {
        found = true;
        CHECK(row.status == "unrecoverable");
      }
    CHECK(found);
  }
}

TEST_CASE("round trip property across random payloads and losses") {
  auto cluster = make_cluster(8, 64ull << 20);
  cluster.create_pool({"ec42", Redundancy::erasure_coded(4, 2), 32ull << 20, PoolRole::S3Cache});
  std::mt19937_64 rng(424242);
  for (int round = 0; round < 1000; ++round) {
    size_t size = 1 + size_t(rng() % 8192);
    auto payload = random_payload(size, rng());
    std::string id = "rt" + std::to_string(round);
    auto [stripe, backend] = cluster.write_object("ec42", id, payload);
    CHECK(backend == 6 * ((size + 3) / 4));
    unsigned losses = unsigned(rng() % 3);  // 0, 1 or 2
    std::set<size_t> down;
    while (down.size() < losses) down.insert(size_t(rng() % stripe.locations.size()));
    for (size_t i : down) cluster.fail_osd(stripe.locations[i].osd_id);
    CHECK(cluster.read_object("ec42", id) == payload);
    for (size_t i : down) cluster.revive_osd(stripe.locations[i].osd_id);
    cluster.remove_object("ec42", id);
  }
}
