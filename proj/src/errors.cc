//
// Copyright 2026 The Datamarket Authors
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
//

#include "datamarket/errors.h"

namespace datamarket {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kOverflow: return "Overflow";
    case ErrorCode::kTooManyOwners: return "TooManyOwners";
    case ErrorCode::kEmptyEvalSet: return "EmptyEvalSet";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kInvalidPrivacyParams: return "InvalidPrivacyParams";
    case ErrorCode::kAllZeroShapley: return "AllZeroShapley";
    case ErrorCode::kTooManyItems: return "TooManyItems";
    case ErrorCode::kBudgetTooLargeForTable: return "BudgetTooLargeForTable";
    case ErrorCode::kEnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::kEmptySolutionSpace: return "EmptySolutionSpace";
    case ErrorCode::kEmptySurvey: return "EmptySurvey";
    case ErrorCode::kSearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::kZeroTotalPrice: return "ZeroTotalPrice";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvalidLabel: return "InvalidLabel";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace datamarket
