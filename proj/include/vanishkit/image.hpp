/*
 * Copyright (c) 2026, The VanishKit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace vanishkit {

/// Single-channel float image, row-major, values nominally in [0, 1].
struct Image
{
  int width = 0;
  int height = 0;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, float fill = 0.0f)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill)
  {
    if (w <= 0 || h <= 0)
      throw std::invalid_argument("Image: non-positive dimensions");
  }

  float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }

  bool contains(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

namespace detail {

/// Reflect-101 border indexing (edge pixel not repeated): -1 -> 1, n -> n-2.
inline int reflect_index(int i, int n)
{
  if (n == 1)
    return 0;
  while (i < 0 || i >= n) {
    if (i < 0)
      i = -i;
    if (i >= n)
      i = 2 * n - 2 - i;
  }
  return i;
}

inline std::vector<float> gaussian_kernel(double sigma)
{
  const int radius = std::max(1, static_cast<int>(std::lround(sigma * 4.0)));
  std::vector<float> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = static_cast<float>(v);
    sum += v;
  }
  for (auto& v : k)
    v = static_cast<float>(v / sum);
  return k;
}

}  // namespace detail

/// Separable Gaussian blur with reflect-101 borders. sigma <= 0 returns a
/// copy of the input.
inline Image gaussian_blur(const Image& src, double sigma)
{
  if (sigma <= 0.0)
    return src;
  const std::vector<float> k = detail::gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);

  Image tmp(src.width, src.height);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += static_cast<double>(k[static_cast<std::size_t>(i + radius)]) *
               src.at(detail::reflect_index(x + i, src.width), y);
      tmp.at(x, y) = static_cast<float>(acc);
    }
  }
  Image dst(src.width, src.height);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += static_cast<double>(k[static_cast<std::size_t>(i + radius)]) *
               tmp.at(x, detail::reflect_index(y + i, src.height));
      dst.at(x, y) = static_cast<float>(acc);
    }
  }
  return dst;
}

/// Downsample by a factor of two, keeping every second pixel.
inline Image half_sample(const Image& src)
{
  const int w = std::max(1, src.width / 2);
  const int h = std::max(1, src.height / 2);
  Image dst(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      dst.at(x, y) = src.at(2 * x, 2 * y);
  return dst;
}

/// Pixelwise difference a - b (dimensions must match).
inline Image subtract(const Image& a, const Image& b)
{
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("subtract: image size mismatch");
  Image dst(a.width, a.height);
  for (std::size_t i = 0; i < a.data.size(); ++i)
    dst.data[i] = a.data[i] - b.data[i];
  return dst;
}

/// 3x3 Sobel derivatives, normalized so a unit intensity step yields a
/// gradient magnitude of about 0.5. Reflect-101 borders.
inline void sobel(const Image& src, Image& gx, Image& gy)
{
  gx = Image(src.width, src.height);
  gy = Image(src.width, src.height);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      auto s = [&](int dx, int dy) {
        return static_cast<double>(src.at(detail::reflect_index(x + dx, src.width),
                                          detail::reflect_index(y + dy, src.height)));
      };
      const double vx = (s(1, -1) + 2.0 * s(1, 0) + s(1, 1)) -
                        (s(-1, -1) + 2.0 * s(-1, 0) + s(-1, 1));
      const double vy = (s(-1, 1) + 2.0 * s(0, 1) + s(1, 1)) -
                        (s(-1, -1) + 2.0 * s(0, -1) + s(1, -1));
      gx.at(x, y) = static_cast<float>(vx / 8.0);
      gy.at(x, y) = static_cast<float>(vy / 8.0);
    }
  }
}

/// Draws an anti-aliased filled disk (1-pixel soft edge) by alpha-blending
/// `value` over the existing content.
inline void draw_disk(Image& img, double cx, double cy, double radius, float value)
{
  if (radius <= 0.0)
    return;
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius - 1.0)));
  const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(cx + radius + 1.0)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius - 1.0)));
  const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(cy + radius + 1.0)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double d = std::hypot(x - cx, y - cy);
      const double cov = std::clamp(0.5 + (radius - d), 0.0, 1.0);
      if (cov > 0.0) {
        float& px = img.at(x, y);
        px = static_cast<float>(px * (1.0 - cov) + value * cov);
      }
    }
  }
}

}  // namespace vanishkit
