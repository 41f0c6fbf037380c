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

#include <filesystem>
#include <memory>
#include <string>

#include "wg/sim.hpp"

namespace wg::state {

inline constexpr int kVersion = 1;

/// Canonical, diff-friendly JSON text with fixed field order.
std::string serialize(const Simulation& sim);
std::unique_ptr<Simulation> deserialize(const std::string& json_text,
                                        const std::string& audit_lines);

/// The audit log lives beside the state file, one canonical record per line.
std::filesystem::path audit_path_for(const std::filesystem::path& state_path);

/// Atomic save: write-new-then-rename for both files (audit first, so a
/// crash in between leaves the state file authoritative).
void save(const Simulation& sim, const std::filesystem::path& path);
std::unique_ptr<Simulation> load(const std::filesystem::path& path);

}  // namespace wg::state
