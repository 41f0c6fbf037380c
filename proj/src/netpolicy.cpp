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

#include "wg/netpolicy.hpp"

#include <sstream>

#include "wg/errors.hpp"

namespace wg::netpolicy {

namespace {

constexpr uint16_t kCampusPorts[] = {443, 8443};

bool campus_port_allowed(uint16_t port) {
  for (uint16_t p : kCampusPorts)
    if (p == port) return true;
  return false;
}

bool rule_matches(const SecurityGroupRule& rule, const std::string& project, uint16_t port,
                  RuleScope scope) {
  return rule.project == project && rule.source_scope == scope &&
         (rule.port == kAnyPort || rule.port == port);
}

std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream is{std::string(text)};
  std::string token;
  while (is >> token) out.push_back(token);
  return out;
}

}  // namespace

Ipv4 Ipv4::parse(std::string_view text) {
  uint32_t value = 0;
  unsigned octets = 0;
  size_t pos = 0;
  while (pos <= text.size() && octets < 4) {
    size_t dot = text.find('.', pos);
    std::string_view part =
        dot == std::string_view::npos ? text.substr(pos) : text.substr(pos, dot - pos);
    if (part.empty() || part.size() > 3) fail(Errc::ValidationError, "bad IPv4: " + std::string(text));
    unsigned octet = 0;
    for (char c : part) {
      if (c < '0' || c > '9') fail(Errc::ValidationError, "bad IPv4: " + std::string(text));
      octet = octet * 10 + unsigned(c - '0');
    }
    if (octet > 255) fail(Errc::ValidationError, "bad IPv4: " + std::string(text));
    value = (value << 8) | octet;
    ++octets;
    if (dot == std::string_view::npos) {
      pos = text.size() + 1;
      break;
    }
    pos = dot + 1;
  }
  if (octets != 4 || pos != text.size() + 1)
    fail(Errc::ValidationError, "bad IPv4: " + std::string(text));
  return Ipv4{value};
}

std::string Ipv4::to_string() const {
  std::ostringstream os;
  os << (value >> 24) << '.' << ((value >> 16) & 0xff) << '.' << ((value >> 8) & 0xff) << '.'
     << (value & 0xff);
  return os.str();
}

Cidr Cidr::parse(std::string_view text) {
  size_t slash = text.find('/');
  if (slash == std::string_view::npos)
    fail(Errc::ValidationError, "CIDR needs a /prefix: " + std::string(text));
  Ipv4 base = Ipv4::parse(text.substr(0, slash));
  std::string_view len_text = text.substr(slash + 1);
  if (len_text.empty() || len_text.size() > 2)
    fail(Errc::ValidationError, "bad CIDR prefix: " + std::string(text));
  unsigned len = 0;
  for (char c : len_text) {
    if (c < '0' || c > '9') fail(Errc::ValidationError, "bad CIDR prefix: " + std::string(text));
    len = len * 10 + unsigned(c - '0');
  }
  if (len > 32) fail(Errc::ValidationError, "bad CIDR prefix: " + std::string(text));
  Cidr cidr;
  cidr.prefix_len = len;
  uint32_t mask = len == 0 ? 0 : ~uint32_t(0) << (32 - len);
  cidr.base = base.value & mask;
  return cidr;
}

bool Cidr::contains(Ipv4 addr) const {
  uint32_t mask = prefix_len == 0 ? 0 : ~uint32_t(0) << (32 - prefix_len);
  return (addr.value & mask) == base;
}

std::string Cidr::to_string() const {
  return Ipv4{base}.to_string() + "/" + std::to_string(prefix_len);
}

const char* scope_name(Scope scope) noexcept {
  switch (scope) {
    case Scope::World: return "world";
    case Scope::Campus: return "campus";
    case Scope::Bastion: return "bastion";
    case Scope::Project: return "project";
  }
  return "world";
}

const char* rule_scope_name(RuleScope scope) noexcept {
  return scope == RuleScope::Campus ? "campus" : "bastion";
}

RuleScope parse_rule_scope(std::string_view text) {
  if (text == "campus") return RuleScope::Campus;
  if (text == "bastion") return RuleScope::Bastion;
  fail(Errc::ValidationError, "rule scope must be campus or bastion");
}

Scope classify_source(Ipv4 addr, const std::string& dst_project, const ScopeConfig& config) {
  auto subnet = config.project_subnets.find(dst_project);
  if (subnet != config.project_subnets.end() && subnet->second.contains(addr))
    return Scope::Project;
  if (config.bastion_addrs.count(addr.value)) return Scope::Bastion;
  for (const Cidr& cidr : config.campus_cidrs)
    if (cidr.contains(addr)) return Scope::Campus;
  return Scope::World;
}

Decision evaluate(const PacketQuery& query, std::span<const SecurityGroupRule> rules,
                  const ScopeConfig& config, audit::Log* log, int64_t now,
                  const std::string& actor) {
  Decision decision;
  if (query.direction == Direction::Egress) {
    decision.allow = true;
    return decision;
  }

  Scope scope = classify_source(query.src, query.dst_project, config);
  auto has_rule = [&](RuleScope rule_scope) {
    for (const SecurityGroupRule& rule : rules)
      if (rule_matches(rule, query.dst_project, query.port, rule_scope)) return true;
    return false;
  };

  switch (scope) {
    case Scope::Project:
      decision.allow = true;
      break;
    case Scope::Bastion:
      if (has_rule(RuleScope::Bastion))
        decision.allow = true;
      else
        decision.reason = "no-exception";
      break;
    case Scope::Campus:
      if (!campus_port_allowed(query.port))
        decision.reason = "port-not-allowed";
      else if (!query.ssl)
        decision.reason = "ssl-required";
      else if (!has_rule(RuleScope::Campus))
        decision.reason = "no-exception";
      else
        decision.allow = true;
      break;
    case Scope::World:
      decision.reason = "scope";
      break;
  }

  if (!decision.allow && log != nullptr)
    log->append(now, actor, "policy-deny",
                "net/" + query.dst_project + "/" + std::to_string(query.port) + "/" +
                    decision.reason,
                audit::Outcome::Denied);
  return decision;
}

std::vector<SecurityGroupRule> parse_rules(std::string_view text) {
  std::vector<SecurityGroupRule> rules;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;

    std::string note;
    size_t hash = line.find('#');
    if (hash != std::string_view::npos) {
      std::string_view raw = line.substr(hash + 1);
      while (!raw.empty() && raw.front() == ' ') raw.remove_prefix(1);
      note = std::string(raw);
      line = line.substr(0, hash);
    }
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 3)
      fail(Errc::ValidationError, "rule line needs: project port source_scope");
    SecurityGroupRule rule;
    rule.project = tokens[0];
    if (tokens[1] == "any") {
      rule.port = kAnyPort;
    } else {
      unsigned port = 0;
      for (char c : tokens[1]) {
        if (c < '0' || c > '9') fail(Errc::ValidationError, "bad port: " + tokens[1]);
        port = port * 10 + unsigned(c - '0');
      }
      if (port < 1 || port > 65535) fail(Errc::ValidationError, "bad port: " + tokens[1]);
      rule.port = uint16_t(port);
    }
    rule.source_scope = parse_rule_scope(tokens[2]);
    rule.note = std::move(note);
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::string format_rules(std::span<const SecurityGroupRule> rules) {
  std::ostringstream os;
  for (const SecurityGroupRule& rule : rules) {
    os << rule.project << ' ';
    if (rule.port == kAnyPort)
      os << "any";
    else
      os << rule.port;
    os << ' ' << rule_scope_name(rule.source_scope);
    if (!rule.note.empty()) os << " # " << rule.note;
    os << '\n';
  }
  return os.str();
}

}  // namespace wg::netpolicy
