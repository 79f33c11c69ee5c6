/* Copyright 2026 The SDANet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sdanet/data.h"
#include "sdanet/errors.h"

namespace sdanet {

namespace {

constexpr double kCubicA = -0.5;

// Mirror about the edge samples without repeating them: -1 -> 1, n -> n-2.
std::size_t reflect_index(long i, long n) {
  if (n == 1) return 0;
  const long period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  if (i >= n) i = period - i;
  return static_cast<std::size_t>(i);
}

struct Taps {
  std::size_t index[4];
  double weight[4];
};

std::vector<Taps> axis_taps(std::size_t in, std::size_t out) {
  std::vector<Taps> taps(out);
  const double ratio = static_cast<double>(in) / static_cast<double>(out);
  for (std::size_t o = 0; o < out; ++o) {
    const double src = (static_cast<double>(o) + 0.5) * ratio - 0.5;
    const double base = std::floor(src);
    const double t = src - base;
    for (int k = 0; k < 4; ++k) {
      taps[o].index[k] = reflect_index(static_cast<long>(base) + k - 1,
                                       static_cast<long>(in));
      taps[o].weight[k] = bicubic_weight(t - (k - 1));
    }
  }
  return taps;
}

}  // namespace

double bicubic_weight(double x) {
  const double ax = std::abs(x);
  if (ax <= 1.0) return ((kCubicA + 2.0) * ax - (kCubicA + 3.0)) * ax * ax + 1.0;
  if (ax < 2.0) return ((kCubicA * ax - 5.0 * kCubicA) * ax + 8.0 * kCubicA) * ax - 4.0 * kCubicA;
  return 0.0;
}

HsiCube bicubic_resize(const HsiCube& cube, std::uint32_t out_h,
                       std::uint32_t out_w) {
  if (out_h == 0 || out_w == 0) {
    throw DimensionError("bicubic_resize: output extents must be positive, got " +
                         std::to_string(out_h) + "x" + std::to_string(out_w));
  }
  if (cube.values.size() !=
      static_cast<std::size_t>(cube.height) * cube.width * cube.bands) {
    throw DimensionError("bicubic_resize: cube '" + cube.name +
                         "' element count does not match its extents");
  }
  const std::vector<Taps> ty = axis_taps(cube.height, out_h);
  const std::vector<Taps> tx = axis_taps(cube.width, out_w);
  HsiCube out(out_h, out_w, cube.bands, cube.name);
  std::vector<double> rows(static_cast<std::size_t>(cube.height) * out_w);
  for (std::size_t b = 0; b < cube.bands; ++b) {
    for (std::size_t y = 0; y < cube.height; ++y) {
      for (std::size_t x = 0; x < out_w; ++x) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += tx[x].weight[k] * cube.at(b, y, tx[x].index[k]);
        rows[y * out_w + x] = s;
      }
    }
    for (std::size_t y = 0; y < out_h; ++y) {
      for (std::size_t x = 0; x < out_w; ++x) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += ty[y].weight[k] * rows[ty[y].index[k] * out_w + x];
        out.at(b, y, x) = static_cast<float>(std::clamp(s, 0.0, 1.0));
      }
    }
  }
  return out;
}

}  // namespace sdanet
