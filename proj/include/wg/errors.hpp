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

#include <stdexcept>
#include <string>

namespace wg {

/// Domain error codes. The token name is part of the external contract:
/// the CLI prints it on stderr and the HTTP facade returns it in the body.
enum class Errc {
  // storage plane
  InsufficientOsds,
  DuplicatePoolName,
  PoolQuotaExceeded,
  ObjectNotFound,
  Unrecoverable,
  TooManyErasures,
  LengthMismatch,
  // gateway
  NameTaken,
  TierForbidden,
  InvalidName,
  BucketQuotaExceeded,
  NoSuchKey,
  KeyRequired,
  KeyMismatch,
  AuthFailure,
  // control plane
  VolumeQuotaExceeded,
  VolumeInUse,
  ProjectQuotaExceeded,
  CapacityExhausted,
  InsufficientClusterHeadroom,
  MalformedName,
  ZeroCapacity,
  // audit / reporting / state
  ClockRegression,
  NothingToReport,
  UnknownResource,
  StateVersionUnsupported,
  ValidationError,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  Errc code() const noexcept { return code_; }
  const char* name() const noexcept { return errc_name(code_); }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message = {});

}  // namespace wg
