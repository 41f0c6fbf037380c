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

#include "wg/errors.hpp"

namespace wg::perfmodel {

namespace {

using poolstore::Redundancy;
using poolstore::Scheme;

double ops_per_object(const Redundancy& scheme) {
  return scheme.scheme == Scheme::Replicated ? double(scheme.copies)
                                             : double(scheme.data_shards + scheme.parity_shards);
}

double penalty_for(const BackendModel& model, const Redundancy& scheme) {
  return scheme.scheme == Scheme::ErasureCoded ? model.cpu_penalty_ec : 1.0;
}

}  // namespace

double backend_bytes(double client_mb, const Redundancy& scheme) {
  if (client_mb < 0) fail(Errc::ValidationError, "client volume must be non-negative");
  return client_mb * scheme.amplification();
}

double client_throughput(const BackendModel& model, const Redundancy& scheme,
                         double object_size_mb) {
  if (object_size_mb <= 0) fail(Errc::ValidationError, "object size must be positive");
  double bandwidth_ceiling =
      model.backend_bandwidth_mbps / scheme.amplification() * penalty_for(model, scheme);
  double iops_ceiling = model.iops_budget * object_size_mb / ops_per_object(scheme);
  return std::min(bandwidth_ceiling, iops_ceiling);
}

BackendModel calibrate(const Redundancy& scheme_a, double throughput_a,
                       const Redundancy& scheme_b, double throughput_b, double object_size_mb,
                       double cpu_penalty_ec) {
  if (throughput_a <= 0 || throughput_b <= 0 || object_size_mb <= 0)
    fail(Errc::ValidationError, "calibration targets must be positive");
  BackendModel model;
  model.cpu_penalty_ec = cpu_penalty_ec;

  // Each target binds at one of its two ceilings; try all four pairings and
  // keep the one that reproduces both targets.
  struct Target {
    const Redundancy* scheme;
    double value;
  };
  Target targets[2] = {{&scheme_a, throughput_a}, {&scheme_b, throughput_b}};
  for (int a_binding = 0; a_binding < 2; ++a_binding) {
    for (int b_binding = 0; b_binding < 2; ++b_binding) {
      double bandwidth = 0.0, iops = 0.0;
      bool ok = true;
      int bindings[2] = {a_binding, b_binding};
      for (int t = 0; t < 2; ++t) {
        const Redundancy& scheme = *targets[t].scheme;
        double value = targets[t].value;
        double penalty =
            scheme.scheme == Scheme::ErasureCoded ? cpu_penalty_ec : 1.0;
        if (bindings[t] == 0) {
          double solved = value * scheme.amplification() / penalty;
          if (bandwidth != 0.0 && std::abs(bandwidth - solved) > 1e-9 * solved) ok = false;
          bandwidth = solved;
        } else {
          double solved = value * ops_per_object(scheme) / object_size_mb;
          if (iops != 0.0 && std::abs(iops - solved) > 1e-9 * solved) ok = false;
          iops = solved;
        }
      }
      if (!ok || bandwidth <= 0.0 || iops <= 0.0) continue;
      if (bandwidth == 0.0 || iops == 0.0) continue;  // both targets bound the same knob
      model.backend_bandwidth_mbps = bandwidth;
      model.iops_budget = iops;
      double check_a = client_throughput(model, scheme_a, object_size_mb);
      double check_b = client_throughput(model, scheme_b, object_size_mb);
      if (std::abs(check_a - throughput_a) <= 1e-6 * throughput_a &&
          std::abs(check_b - throughput_b) <= 1e-6 * throughput_b)
        return model;
    }
  }
  fail(Errc::ValidationError, "no consistent calibration for the given targets");
}

BackendModel default_calibrated_model() {
  return calibrate(poolstore::Redundancy::replicated(3), 4078.0,
                   poolstore::Redundancy::erasure_coded(4, 2), 6310.0, 4.0);
}

std::optional<double> crossover_size(const BackendModel& model, const Redundancy& replicated,
                                     const Redundancy& erasure_coded, double lo, double hi) {
  auto gap = [&](double size) {
    return client_throughput(model, erasure_coded, size) -
           client_throughput(model, replicated, size);
  };
  double f_lo = gap(lo), f_hi = gap(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo < 0) == (f_hi < 0)) return std::nullopt;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    double f_mid = gap(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0) == (f_lo < 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

uint64_t hpl_matrix_size(const HplConfig& config) {
  if (config.threads < 1) fail(Errc::ValidationError, "thread count must be >= 1");
  if (!(config.fill > 0.0 && config.fill <= 1.0))
    fail(Errc::ValidationError, "fill must be in (0, 1]");
  double cells = double(config.threads) * config.fill * config.mem_per_thread_bytes / 8.0;
  return uint64_t(std::floor(std::sqrt(cells)));
}

double percent_of_peak(double measured_gflops, unsigned cores, double peak_gflops_per_core) {
  if (cores < 1 || peak_gflops_per_core <= 0)
    fail(Errc::ValidationError, "cores >= 1 and positive peak required");
  return measured_gflops / (double(cores) * peak_gflops_per_core);
}

double virtualization_loss(double bare_fraction, double vm_fraction) {
  return bare_fraction - vm_fraction;
}

}  // namespace wg::perfmodel
