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

#include "synthpriv/error.h"

namespace synthpriv {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidSchema: return "InvalidSchema";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kUnknownCategory: return "UnknownCategory";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInvalidScale: return "InvalidScale";
    case ErrorCode::kEmptyScores: return "EmptyScores";
    case ErrorCode::kInvalidSensitivity: return "InvalidSensitivity";
    case ErrorCode::kMetadataViolation: return "MetadataViolation";
    case ErrorCode::kExternalProcessFailed: return "ExternalProcessFailed";
    case ErrorCode::kOutputSchemaMismatch: return "OutputSchemaMismatch";
    case ErrorCode::kUnknownAttributeInConfig: return "UnknownAttributeInConfig";
    case ErrorCode::kTooFewRecords: return "TooFewRecords";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kReferenceTooSmall: return "ReferenceTooSmall";
    case ErrorCode::kInsufficientRows: return "InsufficientRows";
    case ErrorCode::kInsufficientIterations: return "InsufficientIterations";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace synthpriv
