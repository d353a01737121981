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

#include "cfaudit/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "cfaudit/error.hpp"

namespace cfaudit {

void ValidateImage(const Image& img) {
  if (img.width == 0 || img.height == 0) Fail(ErrorCode::kValidation, "empty image");
  if (img.pixels.size() != img.width * img.height) {
    Fail(ErrorCode::kValidation, "pixel count does not match width x height");
  }
  for (double p : img.pixels) {
    if (!(p >= 0.0 && p <= 1.0)) Fail(ErrorCode::kValidation, "pixel outside [0, 1]");
  }
}

double Ssim(const Image& a, const Image& b, std::size_t window) {
  if (a.width != b.width || a.height != b.height) {
    Fail(ErrorCode::kDimensionMismatch, "SSIM operands differ in size");
  }
  if (a.pixels.size() != a.width * a.height || b.pixels.size() != b.width * b.height) {
    Fail(ErrorCode::kValidation, "pixel count does not match width x height");
  }
  if (window == 0 || window % 2 == 0) {
    Fail(ErrorCode::kInvalidArgument, "SSIM window must be a positive odd integer");
  }
  if (window > a.width || window > a.height) {
    Fail(ErrorCode::kDimensionMismatch, "SSIM window larger than image");
  }
  constexpr double kC1 = (0.01 * 1.0) * (0.01 * 1.0);
  constexpr double kC2 = (0.03 * 1.0) * (0.03 * 1.0);
  const double count = static_cast<double>(window * window);
  double total = 0.0;
  std::size_t positions = 0;
  for (std::size_t r0 = 0; r0 + window <= a.height; ++r0) {
    for (std::size_t c0 = 0; c0 + window <= a.width; ++c0) {
      double sum_a = 0.0;
      double sum_b = 0.0;
      for (std::size_t r = r0; r < r0 + window; ++r) {
        for (std::size_t c = c0; c < c0 + window; ++c) {
          sum_a += a.at(r, c);
          sum_b += b.at(r, c);
        }
      }
      const double mu_a = sum_a / count;
      const double mu_b = sum_b / count;
      double var_a = 0.0;
      double var_b = 0.0;
      double cov = 0.0;
      for (std::size_t r = r0; r < r0 + window; ++r) {
        for (std::size_t c = c0; c < c0 + window; ++c) {
          const double da = a.at(r, c) - mu_a;
          const double db = b.at(r, c) - mu_b;
          var_a += da * da;
          var_b += db * db;
          cov += da * db;
        }
      }
      var_a /= count;
      var_b /= count;
      cov /= count;
      const double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
      const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
      total += num / den;
      ++positions;
    }
  }
  return total / static_cast<double>(positions);
}

double SsimDistance(const Image& a, const Image& b, std::size_t window) {
  const double s = Ssim(a, b, window);
  if (s <= kSsimEpsilon) {
    Fail(ErrorCode::kInvalidArgument,
         "images maximally dissimilar (SSIM " + std::to_string(s) + ")");
  }
  return 1.0 / s;
}

std::size_t FitWindow(std::size_t width, std::size_t height) {
  std::size_t w = std::min({width, height, kDefaultSsimWindow});
  if (w % 2 == 0) --w;
  return w;
}

FeatureSchema PixelSchema(std::size_t width, std::size_t height,
                          std::vector<std::string> classes) {
  std::vector<FeatureSpec> features;
  features.reserve(width * height);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      FeatureSpec f;
      f.name = "px_" + std::to_string(r) + "_" + std::to_string(c);
      f.min = 0.0;
      f.max = 1.0;
      features.push_back(std::move(f));
    }
  }
  return FeatureSchema(std::move(features), "label", std::move(classes));
}

Image ImageFromInstance(const Instance& x, std::size_t width, std::size_t height) {
  if (x.size() != width * height) {
    Fail(ErrorCode::kDimensionMismatch, "instance does not hold width x height pixels");
  }
  return Image{width, height, x.values};
}

Instance InstanceFromImage(const Image& img) { return Instance{img.pixels}; }

DistanceFn MakeSsimDistance(std::size_t width, std::size_t height, std::size_t window) {
  if (window > width || window > height || window % 2 == 0) {
    Fail(ErrorCode::kInvalidArgument, "invalid SSIM window for image size");
  }
  return [width, height, window](const Instance& x, const Instance& c) {
    const double s =
        Ssim(ImageFromInstance(x, width, height), ImageFromInstance(c, width, height), window);
    if (s <= kSsimEpsilon) return std::numeric_limits<double>::infinity();
    return 1.0 / s;
  };
}

namespace {

// Next whitespace-delimited PGM header token, skipping '#' comments.
std::string PgmToken(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok += static_cast<char>(ch);
  }
  return tok;
}

std::size_t PgmNumber(std::istream& in) {
  const std::string tok = PgmToken(in);
  try {
    std::size_t pos = 0;
    const unsigned long v = std::stoul(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    Fail(ErrorCode::kParse, "bad PGM header token '" + tok + "'");
  }
}

}  // namespace

Image ReadPgm(std::istream& in) {
  const std::string magic = PgmToken(in);
  if (magic != "P2" && magic != "P5") Fail(ErrorCode::kParse, "not a P2/P5 PGM file");
  Image img;
  img.width = PgmNumber(in);
  img.height = PgmNumber(in);
  const std::size_t maxval = PgmNumber(in);
  if (maxval == 0 || maxval > 255) Fail(ErrorCode::kParse, "PGM maxval must be 1..255");
  img.pixels.resize(img.width * img.height);
  const double scale = static_cast<double>(maxval);
  for (double& p : img.pixels) {
    std::size_t v = 0;
    if (magic == "P2") {
      v = PgmNumber(in);
    } else {
      const int ch = in.get();
      if (ch == EOF) Fail(ErrorCode::kParse, "truncated PGM pixel data");
      v = static_cast<std::size_t>(ch);
    }
    if (v > maxval) Fail(ErrorCode::kParse, "PGM pixel exceeds maxval");
    p = static_cast<double>(v) / scale;
  }
  ValidateImage(img);
  return img;
}

Image LoadPgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kNotFound, "cannot open image " + path.string());
  return ReadPgm(in);
}

void WritePgm(std::ostream& out, const Image& img) {
  ValidateImage(img);
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  for (double p : img.pixels) {
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(p * 255.0))));
  }
}

Image ParseImageCsvRow(const std::string& line, std::size_t width, std::size_t height) {
  Image img{width, height, {}};
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      img.pixels.push_back(std::stod(cell));
    } catch (const std::exception&) {
      Fail(ErrorCode::kParse, "bad pixel value '" + cell + "'");
    }
  }
  ValidateImage(img);
  return img;
}

Image LoadImage(const std::filesystem::path& path, std::size_t width, std::size_t height) {
  if (path.extension() == ".pgm") return LoadPgm(path);
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kNotFound, "cannot open image " + path.string());
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return ParseImageCsvRow(line, width, height);
}

}  // namespace cfaudit
