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
#include <functional>
#include <optional>
#include <string>

#include "wg/sim.hpp"

namespace httplib {
class Server;
}

namespace wg::http {

struct FacadeOptions {
  std::string actor = "s3-gateway";
  /// Logical clock for created_ts; wall clock when unset.
  std::optional<int64_t> fixed_now;
  /// Invoked after every successful mutation (the CLI persists here).
  std::function<void()> on_mutation;
};

/// S3-subset routes over one simulation:
///   PUT    /{bucket}/{key}   body = payload, optional x-sse-key header
///   GET    /{bucket}/{key}   optional x-sse-key header
///   DELETE /{bucket}/{key}
///   GET    /{bucket}?prefix=&max-keys=&continuation=
/// Bucket names resolve across tiers in order s3cache, s3secure, s3general.
/// Errors map to 403/404/413 with a JSON body naming the error.
void install_routes(httplib::Server& server, Simulation& sim, const FacadeOptions& options);

/// Blocking listen loop; returns the process exit code.
int serve(Simulation& sim, const std::string& host, int port, const FacadeOptions& options);

}  // namespace wg::http
