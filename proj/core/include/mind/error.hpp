// Copyright 2026 The mind Authors. All rights reserved.
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
#include <string_view>

namespace mind {

enum class ErrorCode {
  // usage / configuration
  kUsage,
  kInvalidConfig,
  kInvalidArgument,
  // data
  kIo,
  kMalformed,
  kDuplicateId,
  kNotFound,
  kMissingImage,
  kFeaturesMissing,
  kEmptyIntention,
  kConfigMismatch,
  kRunAborted,
  kEmptyExport,
  kDimensionMismatch,
  kZeroVector,
  kEmptyInput,
  kEmptyTaxonomy,
  kWrongVoteCount,
  kInsufficientRecords,
  kDuplicateSubmission,
  kTaskComplete,
  kUnknownTask,
  kTaskIncomplete,
  kCapacityExceeded,
  kValidation,
  kRowSumMismatch,
  kTooFewItems,
  kTooFewCategories,
  kLengthMismatch,
  // backend
  kExhaustedRetries,
  kAuthFailed,
  kPayloadTooLarge,
  kBackendRejected,
};

std::string_view to_string(ErrorCode code);

// Process exit code class for an error: 2 usage, 3 data, 4 backend.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace mind
