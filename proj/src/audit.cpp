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

#include "wg/audit.hpp"

#include <sstream>

#include "wg/errors.hpp"

namespace wg::audit {

namespace {

void append_field(Sha256& h, std::string_view field) {
  uint8_t len_be[4];
  uint32_t n = uint32_t(field.size());
  for (int i = 0; i < 4; ++i) len_be[i] = uint8_t(n >> (24 - 8 * i));
  h.update(len_be, 4);
  h.update(field);
}

void check_field(std::string_view field) {
  for (char c : field)
    if (c == '\t' || c == '\n' || c == '\r')
      fail(Errc::ValidationError, "audit fields must not contain tabs or newlines");
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

}  // namespace

const char* outcome_name(Outcome o) noexcept {
  switch (o) {
    case Outcome::Ok: return "ok";
    case Outcome::Denied: return "denied";
    case Outcome::Error: return "error";
  }
  return "error";
}

Outcome parse_outcome(std::string_view text) {
  if (text == "ok") return Outcome::Ok;
  if (text == "denied") return Outcome::Denied;
  if (text == "error") return Outcome::Error;
  fail(Errc::ValidationError, "unknown audit outcome: " + std::string(text));
}

Digest entry_digest(const Entry& entry) {
  Sha256 h;
  h.update(entry.prev_hash.data(), entry.prev_hash.size());
  append_field(h, std::to_string(entry.seq));
  append_field(h, std::to_string(entry.ts));
  append_field(h, entry.actor);
  append_field(h, entry.action);
  append_field(h, entry.resource);
  append_field(h, outcome_name(entry.outcome));
  return h.finish();
}

std::string entry_line(const Entry& e) {
  std::ostringstream os;
  os << e.seq << '\t' << e.ts << '\t' << e.actor << '\t' << e.action << '\t' << e.resource
     << '\t' << outcome_name(e.outcome) << '\t' << hex_encode(e.prev_hash) << '\t'
     << hex_encode(e.entry_hash);
  return os.str();
}

Entry parse_entry_line(std::string_view line) {
  auto fields = split_tabs(line);
  if (fields.size() != 8) fail(Errc::ValidationError, "audit record must have 8 fields");
  Entry e;
  try {
    e.seq = std::stoull(fields[0]);
    e.ts = std::stoll(fields[1]);
  } catch (const std::exception&) {
    fail(Errc::ValidationError, "bad numeric field in audit record");
  }
  e.actor = fields[2];
  e.action = fields[3];
  e.resource = fields[4];
  e.outcome = parse_outcome(fields[5]);
  std::vector<uint8_t> raw;
  if (!hex_decode(fields[6], raw) || raw.size() != 32)
    fail(Errc::ValidationError, "bad prev_hash in audit record");
  std::copy(raw.begin(), raw.end(), e.prev_hash.begin());
  if (!hex_decode(fields[7], raw) || raw.size() != 32)
    fail(Errc::ValidationError, "bad entry_hash in audit record");
  std::copy(raw.begin(), raw.end(), e.entry_hash.begin());
  return e;
}

Log::Log(Log&& other) noexcept {
  std::lock_guard lock(other.mu_);
  entries_ = std::move(other.entries_);
}

Log& Log::operator=(Log&& other) noexcept {
  if (this != &other) {
    std::scoped_lock lock(mu_, other.mu_);
    entries_ = std::move(other.entries_);
  }
  return *this;
}

const Entry& Log::append(int64_t ts, std::string actor, std::string action,
                         std::string resource, Outcome outcome) {
  check_field(actor);
  check_field(action);
  check_field(resource);
  std::lock_guard lock(mu_);
  if (!entries_.empty() && ts < entries_.back().ts)
    fail(Errc::ClockRegression, "audit timestamp earlier than predecessor");
  Entry e;
  e.seq = entries_.size();
  e.ts = ts;
  e.actor = std::move(actor);
  e.action = std::move(action);
  e.resource = std::move(resource);
  e.outcome = outcome;
  e.prev_hash = entries_.empty() ? Digest{} : entries_.back().entry_hash;
  e.entry_hash = entry_digest(e);
  entries_.push_back(std::move(e));
  return entries_.back();
}

std::optional<uint64_t> Log::verify() const {
  std::lock_guard lock(mu_);
  Digest expect_prev{};
  int64_t last_ts = 0;
  for (size_t i = 0; i < entries_.size(); ++i) {
    const Entry& e = entries_[i];
    if (e.seq != i) return i;
    if (e.prev_hash != expect_prev) return i;
    if (i > 0 && e.ts < last_ts) return i;
    if (entry_digest(e) != e.entry_hash) return i;
    expect_prev = e.entry_hash;
    last_ts = e.ts;
  }
  return std::nullopt;
}

std::vector<Entry> Log::query(const Filter& f) const {
  std::lock_guard lock(mu_);
  std::vector<Entry> out;
  for (const Entry& e : entries_) {
    if (f.actor && e.actor != *f.actor) continue;
    if (f.resource && e.resource != *f.resource) continue;
    if (f.from_ts && e.ts < *f.from_ts) continue;
    if (f.to_ts && e.ts > *f.to_ts) continue;
    out.push_back(e);
  }
  return out;
}

size_t Log::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

Entry Log::at(size_t index) const {
  std::lock_guard lock(mu_);
  if (index >= entries_.size()) fail(Errc::UnknownResource, "audit index out of range");
  return entries_[index];
}

std::vector<Entry> Log::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::string Log::to_lines() const {
  std::lock_guard lock(mu_);
  std::string out;
  for (const Entry& e : entries_) {
    out += entry_line(e);
    out += '\n';
  }
  return out;
}

Log Log::from_lines(std::string_view text) {
  Log log;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty()) log.entries_.push_back(parse_entry_line(line));
    start = end + 1;
  }
  return log;
}

void Log::restore(std::vector<Entry> entries) {
  std::lock_guard lock(mu_);
  entries_ = std::move(entries);
}

}  // namespace wg::audit
