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
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "wg/digest.hpp"

namespace wg::audit {

enum class Outcome { Ok, Denied, Error };

const char* outcome_name(Outcome o) noexcept;
Outcome parse_outcome(std::string_view text);

struct Entry {
  uint64_t seq = 0;
  int64_t ts = 0;
  std::string actor;
  std::string action;    // verb token: put-object, launch-vm, policy-deny, ...
  std::string resource;  // path-like identifier
  Outcome outcome = Outcome::Ok;
  Digest prev_hash{};
  Digest entry_hash{};
};

/// entry_hash = SHA-256(prev_hash || length-prefixed fields in declared order).
Digest entry_digest(const Entry& entry);

/// One canonical tab-separated record; hashes hex-encoded.
std::string entry_line(const Entry& entry);
Entry parse_entry_line(std::string_view line);

/// Hash-chained, append-only compliance log. Genesis prev_hash is 32 zero
/// bytes; seq starts at 0 and increases by exactly 1.
class Log {
 public:
  Log() = default;
  Log(Log&& other) noexcept;
  Log& operator=(Log&& other) noexcept;

  /// Appends and chains a record. Throws ClockRegression if ts moves backward.
  const Entry& append(int64_t ts, std::string actor, std::string action, std::string resource,
                      Outcome outcome);

  /// Recomputes every hash; nullopt when intact, else the first bad seq.
  std::optional<uint64_t> verify() const;

  struct Filter {
    std::optional<std::string> actor;
    std::optional<std::string> resource;
    std::optional<int64_t> from_ts;  // inclusive
    std::optional<int64_t> to_ts;    // inclusive
  };
  std::vector<Entry> query(const Filter& filter) const;

  size_t size() const;
  Entry at(size_t index) const;
  std::vector<Entry> entries() const;

  std::string to_lines() const;
  /// Loads without verifying; run verify() to check integrity.
  static Log from_lines(std::string_view text);
  /// Raw restore hook for the persistence layer.
  void restore(std::vector<Entry> entries);

 private:
  mutable std::mutex mu_;
  std::vector<Entry> entries_;
};

}  // namespace wg::audit
