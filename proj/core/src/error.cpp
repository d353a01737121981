/*
 * Copyright 2026 The cfaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cfaudit/error.hpp"

namespace cfaudit {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kValidation: return "validation_error";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kInfeasibleSpace: return "infeasible_space";
    case ErrorCode::kZeroDistance: return "zero_distance";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kTraining: return "training_error";
    case ErrorCode::kTransport: return "transport_error";
    case ErrorCode::kProtocol: return "protocol_error";
    case ErrorCode::kBudgetExhausted: return "budget_exhausted";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace cfaudit
