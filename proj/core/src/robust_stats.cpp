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

#include "cfaudit/robust_stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cfaudit/error.hpp"

namespace cfaudit {

double Median(std::span<const double> values) {
  if (values.empty()) Fail(ErrorCode::kInvalidArgument, "median of empty set");
  std::vector<double> tmp(values.begin(), values.end());
  const std::size_t mid = tmp.size() / 2;
  std::nth_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(mid),
                   tmp.end());
  const double upper = tmp[mid];
  if (tmp.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double MedianAbsoluteDeviation(std::span<const double> values) {
  const double med = Median(values);
  std::vector<double> dev;
  dev.reserve(values.size());
  for (double v : values) dev.push_back(std::fabs(v - med));
  return Median(dev);
}

double Mean(std::span<const double> values) {
  if (values.empty()) Fail(ErrorCode::kInvalidArgument, "mean of empty set");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double SampleStdDev(std::span<const double> values) {
  if (values.size() < 2) {
    Fail(ErrorCode::kInvalidArgument, "sample standard deviation needs >= 2 values");
  }
  const double mean = Mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t master_seed, std::uint64_t index) {
  return Mix64(master_seed ^ Mix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace cfaudit
