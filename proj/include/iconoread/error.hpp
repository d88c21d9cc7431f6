/* Copyright 2026 The Iconoread Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace iconoread {

// Mirrors icr_status in the C API one-to-one (same numeric values).
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kParse = 2,
  kSchema = 3,
  kValidation = 4,
  kEmptyMask = 5,
  kDimensionMismatch = 6,
  kImageUnreadable = 7,
  kProviderUnavailable = 8,
  kProtocol = 9,
  kDatabase = 10,
  kManifest = 11,
  kMissingTruth = 12,
  kIdMismatch = 13,
  kIo = 14,
  kInternal = 15,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace iconoread
