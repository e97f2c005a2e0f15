// Copyright 2026 The Falsiflow Authors
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

#include "falsiflow/error.hpp"

namespace falsiflow {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNegativeMass: return "NegativeMass";
    case ErrorCode::kMassSumOutOfTolerance: return "MassSumOutOfTolerance";
    case ErrorCode::kDuplicateLabel: return "DuplicateLabel";
    case ErrorCode::kEmptyData: return "EmptyData";
    case ErrorCode::kSupportMismatch: return "SupportMismatch";
    case ErrorCode::kSupportTooLarge: return "SupportTooLarge";
    case ErrorCode::kTooManySelections: return "TooManySelections";
    case ErrorCode::kEmptyValue: return "EmptyValue";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kLpFailure: return "LpFailure";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kIterationLimit: return "IterationLimit";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kUnknownOutcome: return "UnknownOutcome";
    case ErrorCode::kDiverged: return "Diverged";
    case ErrorCode::kBadParameters: return "BadParameters";
    case ErrorCode::kNotMonotone: return "NotMonotone";
    case ErrorCode::kGridTooCoarse: return "GridTooCoarse";
    case ErrorCode::kBadRule: return "BadRule";
    case ErrorCode::kNotOrdered: return "NotOrdered";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace falsiflow
