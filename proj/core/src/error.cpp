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

#include "mind/error.hpp"

namespace mind {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return "Usage";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kMalformed: return "Malformed";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kMissingImage: return "MissingImage";
    case ErrorCode::kFeaturesMissing: return "FeaturesMissing";
    case ErrorCode::kEmptyIntention: return "EmptyIntention";
    case ErrorCode::kConfigMismatch: return "ConfigMismatch";
    case ErrorCode::kRunAborted: return "RunAborted";
    case ErrorCode::kEmptyExport: return "EmptyExport";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kEmptyTaxonomy: return "EmptyTaxonomy";
    case ErrorCode::kWrongVoteCount: return "WrongVoteCount";
    case ErrorCode::kInsufficientRecords: return "InsufficientRecords";
    case ErrorCode::kDuplicateSubmission: return "DuplicateSubmission";
    case ErrorCode::kTaskComplete: return "TaskComplete";
    case ErrorCode::kUnknownTask: return "UnknownTask";
    case ErrorCode::kTaskIncomplete: return "TaskIncomplete";
    case ErrorCode::kCapacityExceeded: return "CapacityExceeded";
    case ErrorCode::kValidation: return "Validation";
    case ErrorCode::kRowSumMismatch: return "RowSumMismatch";
    case ErrorCode::kTooFewItems: return "TooFewItems";
    case ErrorCode::kTooFewCategories: return "TooFewCategories";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kExhaustedRetries: return "ExhaustedRetries";
    case ErrorCode::kAuthFailed: return "AuthFailed";
    case ErrorCode::kPayloadTooLarge: return "PayloadTooLarge";
    case ErrorCode::kBackendRejected: return "BackendRejected";
  }
  return "Unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidArgument:
      return 2;
    case ErrorCode::kExhaustedRetries:
    case ErrorCode::kAuthFailed:
    case ErrorCode::kPayloadTooLarge:
    case ErrorCode::kBackendRejected:
    case ErrorCode::kRunAborted:
      return 4;
    default:
      return 3;
  }
}

}  // namespace mind
