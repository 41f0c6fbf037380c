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

#include "wg/perfmodel.hpp"

#include <cmath>

#include "doctest.h"
#include "wg/errors.hpp"

using namespace wg;
using namespace wg::perfmodel;
using poolstore::Redundancy;

namespace {
const Redundancy kRep3 = Redundancy::replicated(3);
const Redundancy kEc42 = Redundancy::erasure_coded(4, 2);
}  // namespace

TEST_CASE("backend volume anchors are bit-exact") {
  CHECK(backend_bytes(4078.0, kRep3) == 12234.0);
  CHECK(backend_bytes(6310.0, kEc42) == 9465.0);
  CHECK(backend_bytes(100.0, Redundancy::replicated(2)) == 200.0);
  CHECK(backend_bytes(0.0, kRep3) == 0.0);
}

TEST_CASE("calibration solves the two ceiling equations") {
  BackendModel model = calibrate(kRep3, 4078.0, kEc42, 6310.0, 4.0);
  CHECK(model.backend_bandwidth_mbps == doctest::Approx(12234.0).epsilon(1e-9));
  CHECK(model.iops_budget == doctest::Approx(9465.0).epsilon(1e-9));
  CHECK(client_throughput(model, kRep3, 4.0) == doctest::Approx(4078.0).epsilon(1e-9));
  CHECK(client_throughput(model, kEc42, 4.0) == doctest::Approx(6310.0).epsilon(1e-9));

  SUBCASE("the default model is exactly this calibration") {
    auto dflt = default_calibrated_model();
    CHECK(dflt.backend_bandwidth_mbps == model.backend_bandwidth_mbps);
    CHECK(dflt.iops_budget == model.iops_budget);
  }
}

TEST_CASE("replicated wins small objects, erasure coding wins large ones") {
  auto model = default_calibrated_model();
  CHECK(client_throughput(model, kEc42, 4.0) > client_throughput(model, kRep3, 4.0));
  CHECK(client_throughput(model, kEc42, 0.1) < client_throughput(model, kRep3, 0.1));

  auto crossing = crossover_size(model, kRep3, kEc42, 0.1, 4.0);
  REQUIRE(crossing.has_value());
  // hand-derived: the ec iops line I*s/6 meets the replicated bandwidth
  // ceiling B/3 = 4078 at s = 4078 * 6 / 9465
  CHECK(*crossing == doctest::Approx(4078.0 * 6.0 / 9465.0).epsilon(1e-6));

  SUBCASE("no crossover when the range stays on one side") {
    CHECK_FALSE(crossover_size(model, kRep3, kEc42, 0.01, 0.1).has_value());
  }
}

TEST_CASE("client throughput is non-decreasing in object size") {
  auto model = default_calibrated_model();
  for (const Redundancy& scheme : {kRep3, kEc42}) {
    double last = 0.0;
    for (double size = 0.05; size < 32.0; size *= 1.3) {
      double t = client_throughput(model, scheme, size);
      CHECK(t >= last);
      last = t;
    }
  }
}

TEST_CASE("throughput scales linearly in the iops budget for small objects") {
  auto model = default_calibrated_model();
  auto halved = model;
  halved.iops_budget /= 2.0;
  for (const Redundancy& scheme : {kRep3, kEc42})
    CHECK(client_throughput(halved, scheme, 0.01) ==
          doctest::Approx(client_throughput(model, scheme, 0.01) / 2.0));
}

TEST_CASE("large-object limit approaches the bandwidth ratio") {
  auto model = default_calibrated_model();
  double rep = client_throughput(model, kRep3, 1e9);
  double ec = client_throughput(model, kEc42, 1e9);
  CHECK(ec / rep == doctest::Approx(2.0 * model.cpu_penalty_ec).epsilon(1e-9));
}

TEST_CASE("benchmark matrix sizing floors the formula") {
  // independent recomputation with long doubles
  auto oracle = [](unsigned t) {
    long double cells = (long double)(t)*0.8L * 2.0L * 1024.0L * 1024.0L * 1024.0L / 8.0L;
    return uint64_t(std::floor(std::sqrt((double)cells)));
  };
  CHECK(hpl_matrix_size({.threads = 1}) == 14654);
  CHECK(hpl_matrix_size({.threads = 4}) == 29308);
  CHECK(hpl_matrix_size({.threads = 16}) == 58617);
  for (unsigned t : {1u, 2u, 3u, 4u, 8u, 16u, 24u, 32u})
    CHECK(hpl_matrix_size({.threads = t}) == oracle(t));

  SUBCASE("weak scaling keeps per-thread memory fixed") {
    double n1 = std::sqrt(1.0 * 0.8 * 2.0 * 1024 * 1024 * 1024 / 8.0);
    for (unsigned t : {4u, 9u, 16u, 25u}) {
      double expect = n1 * std::sqrt(double(t));
      CHECK(hpl_matrix_size({.threads = t}) == uint64_t(std::floor(expect)));
    }
  }

  SUBCASE("validation") {
    CHECK_THROWS_AS(hpl_matrix_size({.threads = 0}), Error);
    HplConfig bad;
    bad.fill = 0.0;
    CHECK_THROWS_AS(hpl_matrix_size(bad), Error);
  }
}

TEST_CASE("model volume matches storage-plane accounting on the same workload") {
  poolstore::Cluster cluster;
  for (int i = 0; i < 8; ++i) cluster.add_osd(1ull << 28);
  cluster.create_pool({"rep3", kRep3, 16ull << 20, poolstore::PoolRole::Block});
  cluster.create_pool({"ec42", kEc42, 16ull << 20, poolstore::PoolRole::S3Cache});
  std::vector<size_t> sizes = {4096, 81920, 1 << 20};  // all multiples of k=4
  uint64_t logical = 0;
  for (size_t i = 0; i < sizes.size(); ++i) {
    std::vector<uint8_t> payload(sizes[i], uint8_t(i));
    cluster.write_object("rep3", "w" + std::to_string(i), payload);
    cluster.write_object("ec42", "w" + std::to_string(i), payload);
    logical += sizes[i];
  }
  auto rep = cluster.accounting("rep3");
  auto ec = cluster.accounting("ec42");
  CHECK(double(rep.backend_bytes) == backend_bytes(double(logical), kRep3));
  CHECK(double(ec.backend_bytes) == backend_bytes(double(logical), kEc42));
}

TEST_CASE("percent of peak bookkeeping") {
  CHECK(percent_of_peak(36.4, 1, 40.0) == doctest::Approx(0.91).epsilon(1e-12));
  CHECK(percent_of_peak(40.0, 1, 40.0) == 1.0);
  CHECK(percent_of_peak(46.4 * 0.87, 1, 46.4) == doctest::Approx(0.87).epsilon(1e-12));
  CHECK(virtualization_loss(0.91, 0.87) == doctest::Approx(0.04).epsilon(1e-12));
  CHECK_THROWS_AS(percent_of_peak(1.0, 0, 40.0), Error);
}
