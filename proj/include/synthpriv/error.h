// Copyright 2026 The SynthPriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SYNTHPRIV_ERROR_H_
#define SYNTHPRIV_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace synthpriv {

// Every failure the library reports. Callers switch on the code; the message
// is for humans.
enum class ErrorCode {
  kInvalidArgument,
  kInvalidSchema,
  kMissingColumn,
  kUnknownCategory,
  kOutOfRange,
  kParseError,
  kEmptyDataset,
  kInvalidConfig,
  kInvalidScale,
  kEmptyScores,
  kInvalidSensitivity,
  kMetadataViolation,
  kExternalProcessFailed,
  kOutputSchemaMismatch,
  kUnknownAttributeInConfig,
  kTooFewRecords,
  kRankDeficient,
  kReferenceTooSmall,
  kInsufficientRows,
  kInsufficientIterations,
  kSchemaMismatch,
  kConfigError,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace synthpriv

#endif  // SYNTHPRIV_ERROR_H_
