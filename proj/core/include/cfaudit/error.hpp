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

#ifndef CFAUDIT_ERROR_HPP_
#define CFAUDIT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace cfaudit {

// Error categories shared by the library, CLI exit codes and HTTP statuses.
enum class ErrorCode {
  kInvalidArgument,   // caller supplied something malformed
  kParse,             // file or payload could not be parsed
  kValidation,        // parsed fine but violates a schema invariant
  kNotFound,
  kInfeasibleSpace,   // the constrained candidate set is empty (or looks empty)
  kZeroDistance,
  kDimensionMismatch,
  kTraining,
  kTransport,         // external predictor I/O failure
  kProtocol,          // external predictor replied with garbage
  kBudgetExhausted,
  kInternal,
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

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

}  // namespace cfaudit

#endif  // CFAUDIT_ERROR_HPP_
