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

#ifndef CFAUDIT_TESTS_SUPPORT_EXPECT_HPP_
#define CFAUDIT_TESTS_SUPPORT_EXPECT_HPP_

#include <gtest/gtest.h>

#include <functional>

#include "cfaudit/error.hpp"

namespace cfaudit::testing {

// Code of the cfaudit::Error thrown by `fn`; records a failure when nothing
// is thrown.
inline ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInternal;
}

}  // namespace cfaudit::testing

#endif  // CFAUDIT_TESTS_SUPPORT_EXPECT_HPP_
