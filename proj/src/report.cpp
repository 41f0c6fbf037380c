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

#include "wg/report.hpp"

#include <iomanip>
#include <sstream>

#include "wg/errors.hpp"
#include "wg/lifecycle.hpp"

namespace wg::report {

namespace {

std::string fixed2(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

std::string fixed4(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

/// Left-aligned columns padded to the widest cell.
std::string align(const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> widths;
  for (const auto& row : rows)
    for (size_t c = 0; c < row.size(); ++c) {
      if (widths.size() <= c) widths.resize(c + 1, 0);
      widths[c] = std::max(widths[c], row[c].size());
    }
  std::ostringstream os;
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      os << row[c];
      if (c + 1 < row.size()) os << std::string(widths[c] - row[c].size() + 2, ' ');
    }
    os << '\n';
  }
  return os.str();
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string csv_join(const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      os << csv_field(row[c]);
      if (c + 1 < row.size()) os << ',';
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace

Rendered throughput(const perfmodel::BackendModel& model,
                    const std::vector<poolstore::Redundancy>& schemes,
                    const std::vector<double>& sizes_mb) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"size_mb", "scheme", "client_mbps", "backend_mbps"});
  for (double size : sizes_mb)
    for (const auto& scheme : schemes) {
      double client = perfmodel::client_throughput(model, scheme, size);
      double backend = perfmodel::backend_bytes(client, scheme);
      rows.push_back({fixed2(size), scheme.to_string(), fixed2(client), fixed2(backend)});
    }
  return {align(rows), csv_join(rows)};
}

Rendered scaling(const std::vector<unsigned>& threads, const perfmodel::HplConfig& base) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"threads", "matrix_size"});
  for (unsigned t : threads) {
    perfmodel::HplConfig config = base;
    config.threads = t;
    rows.push_back({std::to_string(t), std::to_string(perfmodel::hpl_matrix_size(config))});
  }
  return {align(rows), csv_join(rows)};
}

Rendered utilization(const Simulation& sim) {
  auto pool_names = sim.cluster.pool_names();
  if (pool_names.empty()) fail(Errc::NothingToReport, "no pools in the cluster");
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"pool", "role", "scheme", "quota_bytes", "logical_bytes", "backend_bytes",
                  "amplification", "utilization"});
  for (const auto& name : pool_names) {
    const auto& pool = sim.cluster.pool(name);
    auto acct = sim.cluster.accounting(name);
    double util =
        pool.spec().quota_bytes == 0
            ? 0.0
            : double(acct.logical_bytes) / double(pool.spec().quota_bytes);
    rows.push_back({name, poolstore::pool_role_name(pool.spec().role),
                    pool.spec().redundancy.to_string(), std::to_string(pool.spec().quota_bytes),
                    std::to_string(acct.logical_bytes), std::to_string(acct.backend_bytes),
                    fixed4(acct.amplification), fixed4(util)});
  }
  std::string csv = csv_join(rows);
  std::string table = align(rows);
  if (sim.cluster.pool_for_role(poolstore::PoolRole::S3Cache)) {
    double cache = lifecycle::utilization(sim.gateway);
    table += "cache_tier_utilization: " + fixed4(cache) + "\n";
    csv += "cache_tier_utilization," + fixed4(cache) + "\n";
  }
  return {table, csv};
}

Rendered pricing(const ctl::CostModel& model, const ctl::Bundle& bundle) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"item", "annual_cost", "capacity_units", "unit_price", "total"});
  for (const auto& [cls, cc] : model.classes)
    rows.push_back({cls, fixed2(cc.annual_cost), fixed2(cc.capacity_units),
                    fixed2(ctl::unit_price(model, cls)), ""});
  double bundle_price = ctl::price_bundle(model, bundle);
  double revenue = ctl::revenue_at_recovery(model);
  double cost = ctl::total_annual_cost(model);
  rows.push_back({"bundle_price", "", "", "", fixed2(bundle_price)});
  rows.push_back({"revenue_at_recovery", "", "", "", fixed2(revenue)});
  rows.push_back({"annual_cost", "", "", "", fixed2(cost)});
  return {align(rows), csv_join(rows)};
}

}  // namespace wg::report
