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

#include "wg/errors.hpp"

namespace wg {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InsufficientOsds: return "InsufficientOsds";
    case Errc::DuplicatePoolName: return "DuplicatePoolName";
    case Errc::PoolQuotaExceeded: return "PoolQuotaExceeded";
    case Errc::ObjectNotFound: return "ObjectNotFound";
    case Errc::Unrecoverable: return "Unrecoverable";
    case Errc::TooManyErasures: return "TooManyErasures";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::NameTaken: return "NameTaken";
    case Errc::TierForbidden: return "TierForbidden";
    case Errc::InvalidName: return "InvalidName";
    case Errc::BucketQuotaExceeded: return "BucketQuotaExceeded";
    case Errc::NoSuchKey: return "NoSuchKey";
    case Errc::KeyRequired: return "KeyRequired";
    case Errc::KeyMismatch: return "KeyMismatch";
    case Errc::AuthFailure: return "AuthFailure";
    case Errc::VolumeQuotaExceeded: return "VolumeQuotaExceeded";
    case Errc::VolumeInUse: return "VolumeInUse";
    case Errc::ProjectQuotaExceeded: return "ProjectQuotaExceeded";
    case Errc::CapacityExhausted: return "CapacityExhausted";
    case Errc::InsufficientClusterHeadroom: return "InsufficientClusterHeadroom";
    case Errc::MalformedName: return "MalformedName";
    case Errc::ZeroCapacity: return "ZeroCapacity";
    case Errc::ClockRegression: return "ClockRegression";
    case Errc::NothingToReport: return "NothingToReport";
    case Errc::UnknownResource: return "UnknownResource";
    case Errc::StateVersionUnsupported: return "StateVersionUnsupported";
    case Errc::ValidationError: return "ValidationError";
  }
  return "UnknownError";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(message.empty() ? errc_name(code)
                                         : std::string(errc_name(code)) + ": " + message),
      code_(code) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace wg
