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

#ifndef CFAUDIT_ROBUST_STATS_HPP_
#define CFAUDIT_ROBUST_STATS_HPP_

#include <cstdint>
#include <span>

namespace cfaudit {

// Median of `values`. Even-length inputs average the two middle values.
// Throws kInvalidArgument on an empty span.
double Median(std::span<const double> values);

// Median absolute deviation in raw units (no Gaussian consistency factor):
// median(|v - median(v)|).
double MedianAbsoluteDeviation(std::span<const double> values);

double Mean(std::span<const double> values);

// Unbiased (N-1) sample standard deviation. Requires at least two values.
double SampleStdDev(std::span<const double> values);

// SplitMix64 finalizer; used to derive independent per-instance seeds.
std::uint64_t Mix64(std::uint64_t x);

// seed_i = hash(master_seed, index). Stable across platforms.
std::uint64_t DeriveSeed(std::uint64_t master_seed, std::uint64_t index);

}  // namespace cfaudit

#endif  // CFAUDIT_ROBUST_STATS_HPP_
