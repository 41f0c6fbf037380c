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
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "wg/audit.hpp"

namespace wg::netpolicy {

struct Ipv4 {
  uint32_t value = 0;
  static Ipv4 parse(std::string_view text);
  std::string to_string() const;
  auto operator<=>(const Ipv4&) const = default;
};

struct Cidr {
  uint32_t base = 0;
  unsigned prefix_len = 0;
  static Cidr parse(std::string_view text);
  bool contains(Ipv4 addr) const;
  std::string to_string() const;
  bool operator==(const Cidr&) const = default;
};

/// Source classification, most specific first: the destination project's
/// own subnet, then the bastion host, then campus ranges, then the world.
enum class Scope { World, Campus, Bastion, Project };
const char* scope_name(Scope scope) noexcept;

enum class RuleScope { Campus, Bastion };
const char* rule_scope_name(RuleScope scope) noexcept;
RuleScope parse_rule_scope(std::string_view text);

inline constexpr uint16_t kAnyPort = 0;

/// Security-group exception; rules only ever widen ingress.
struct SecurityGroupRule {
  std::string project;
  uint16_t port = kAnyPort;  // 0 matches any port
  RuleScope source_scope = RuleScope::Campus;
  std::string note;
};

struct ScopeConfig {
  std::vector<Cidr> campus_cidrs;
  std::set<uint32_t> bastion_addrs;
  std::map<std::string, Cidr> project_subnets;
};

enum class Direction { Ingress, Egress };

struct PacketQuery {
  Direction direction = Direction::Ingress;
  Ipv4 src;
  std::string dst_project;  // project owning the destination VM
  uint16_t port = 0;
  bool ssl = false;
};

struct Decision {
  bool allow = false;
  std::string reason;  // names the failed condition; empty on allow
};

Scope classify_source(Ipv4 addr, const std::string& dst_project, const ScopeConfig& config);

/// Default-deny ingress: project traffic is open, bastion traffic needs an
/// exception, campus traffic needs 443/8443 with SSL plus an exception,
/// world traffic is always refused. Egress is unrestricted. Denials are
/// appended to the audit log when one is supplied.
Decision evaluate(const PacketQuery& query, std::span<const SecurityGroupRule> rules,
                  const ScopeConfig& config, audit::Log* log = nullptr, int64_t now = 0,
                  const std::string& actor = "netpolicy");

/// Line format: `project port source_scope [# note]`; port is a number or
/// "any"; blank lines and comment lines are skipped.
std::vector<SecurityGroupRule> parse_rules(std::string_view text);
std::string format_rules(std::span<const SecurityGroupRule> rules);

}  // namespace wg::netpolicy
