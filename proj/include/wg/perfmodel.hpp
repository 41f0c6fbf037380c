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
#include <optional>

#include "wg/poolstore.hpp"

namespace wg::perfmodel {

/// Backend write volume for a given client volume under a redundancy
/// scheme: r for replication, (k+m)/k for erasure coding.
double backend_bytes(double client_mb, const poolstore::Redundancy& scheme);

/// Two-ceiling throughput model. The bandwidth ceiling divides the backend
/// bandwidth by the scheme's amplification (erasure coding additionally
/// pays a CPU penalty); the IOPS ceiling charges one backend op per shard.
struct BackendModel {
  double backend_bandwidth_mbps = 0.0;
  double iops_budget = 0.0;
  double cpu_penalty_ec = 0.78;  // fitted constant
};

double client_throughput(const BackendModel& model, const poolstore::Redundancy& scheme,
                         double object_size_mb);

/// Solves the two ceiling equations so that scheme_a hits throughput_a and
/// scheme_b hits throughput_b at the given object size.
BackendModel calibrate(const poolstore::Redundancy& scheme_a, double throughput_a,
                       const poolstore::Redundancy& scheme_b, double throughput_b,
                       double object_size_mb, double cpu_penalty_ec = 0.78);

/// Model calibrated to the measured 4 MB write throughputs: 4,078 MB/s on
/// 3x replication and 6,310 MB/s on 4:2 erasure coding.
BackendModel default_calibrated_model();

/// Object size in [lo, hi] where the erasure-coded scheme starts beating
/// the replicated one; nullopt when the ordering never flips in range.
std::optional<double> crossover_size(const BackendModel& model,
                                     const poolstore::Redundancy& replicated,
                                     const poolstore::Redundancy& erasure_coded, double lo,
                                     double hi);

struct HplConfig {
  unsigned threads = 1;
  double mem_per_thread_bytes = 2.0 * 1024 * 1024 * 1024;
  double fill = 0.8;
  double peak_gflops_per_core = 40.0;
};

/// N = floor(sqrt(threads * fill * mem_per_thread / 8)); one side of the
/// square benchmark matrix.
uint64_t hpl_matrix_size(const HplConfig& config);

double percent_of_peak(double measured_gflops, unsigned cores, double peak_gflops_per_core);
double virtualization_loss(double bare_fraction, double vm_fraction);

}  // namespace wg::perfmodel
