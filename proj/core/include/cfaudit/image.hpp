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

#ifndef CFAUDIT_IMAGE_HPP_
#define CFAUDIT_IMAGE_HPP_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

#include "cfaudit/distance.hpp"
#include "cfaudit/schema.hpp"

namespace cfaudit {

// Single-channel image with pixels in [0, 1], row-major.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;

  double at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
  bool operator==(const Image&) const = default;
};

inline constexpr std::size_t kDefaultSsimWindow = 11;
// SSIM at or below this value makes 1/SSIM undefined.
inline constexpr double kSsimEpsilon = 1e-6;

// Throws kValidation if dimensions or pixel values are inconsistent.
void ValidateImage(const Image& img);

// Single-scale SSIM with a uniform window, averaged over every valid window
// position. Constants C1 = (0.01 L)^2, C2 = (0.03 L)^2 with L = 1.
double Ssim(const Image& a, const Image& b, std::size_t window = kDefaultSsimWindow);

// 1 / SSIM. Throws kInvalidArgument ("images maximally dissimilar") when
// SSIM <= kSsimEpsilon.
double SsimDistance(const Image& a, const Image& b,
                    std::size_t window = kDefaultSsimWindow);

// Largest odd window <= min(width, height), capped at kDefaultSsimWindow.
std::size_t FitWindow(std::size_t width, std::size_t height);

// Image mode treats every pixel as a continuous feature in [0, 1].
FeatureSchema PixelSchema(std::size_t width, std::size_t height,
                          std::vector<std::string> classes);
Image ImageFromInstance(const Instance& x, std::size_t width, std::size_t height);
Instance InstanceFromImage(const Image& img);

// SSIM distance over pixel instances; returns +infinity when SSIM is too
// small for 1/SSIM to be meaningful.
DistanceFn MakeSsimDistance(std::size_t width, std::size_t height, std::size_t window);

// PGM P2 (ASCII) or P5 (binary), maxval <= 255, rescaled to [0, 1].
Image ReadPgm(std::istream& in);
Image LoadPgm(const std::filesystem::path& path);
// Writes binary P5 with maxval 255.
void WritePgm(std::ostream& out, const Image& img);
// One row of width*height comma-separated reals.
Image ParseImageCsvRow(const std::string& line, std::size_t width, std::size_t height);
Image LoadImage(const std::filesystem::path& path, std::size_t width, std::size_t height);

}  // namespace cfaudit

#endif  // CFAUDIT_IMAGE_HPP_
