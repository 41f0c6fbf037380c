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

#include <string>
#include <vector>

#include "wg/controlplane.hpp"
#include "wg/perfmodel.hpp"
#include "wg/sim.hpp"

namespace wg::report {

/// Every report renders twice: an aligned text table for humans and a CSV
/// block with a header row for machines.
struct Rendered {
  std::string table;
  std::string csv;
};

Rendered throughput(const perfmodel::BackendModel& model,
                    const std::vector<poolstore::Redundancy>& schemes,
                    const std::vector<double>& sizes_mb);

Rendered scaling(const std::vector<unsigned>& threads, const perfmodel::HplConfig& base);

/// Per-pool accounting plus the cache-tier fill fraction. Throws
/// NothingToReport when the cluster has no pools.
Rendered utilization(const Simulation& sim);

Rendered pricing(const ctl::CostModel& model, const ctl::Bundle& bundle);

}  // namespace wg::report
