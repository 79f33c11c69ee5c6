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

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sdanet/data.h"
#include "sdanet/errors.h"

namespace sdanet {

namespace {

HsiCube crop(const HsiCube& src, std::uint32_t row, std::uint32_t col,
             std::uint32_t size, std::string name) {
  HsiCube out(size, size, src.bands, std::move(name));
  for (std::size_t b = 0; b < src.bands; ++b)
    for (std::size_t y = 0; y < size; ++y)
      for (std::size_t x = 0; x < size; ++x)
        out.at(b, y, x) = src.at(b, row + y, col + x);
  return out;
}

}  // namespace

std::vector<PatchPair> extract_patches(const HsiCube& hr, std::uint32_t lr_size,
                                       std::uint32_t scale,
                                       std::uint32_t stride) {
  if (lr_size == 0 || scale == 0 || stride == 0) {
    throw ConfigError("extract_patches: lr_size, scale and stride must be positive");
  }
  const std::uint64_t hr_size = static_cast<std::uint64_t>(lr_size) * scale;
  if (hr.height < hr_size || hr.width < hr_size) {
    throw DimensionError("extract_patches: cube " + std::to_string(hr.height) +
                         "x" + std::to_string(hr.width) +
                         " smaller than one HR patch of " +
                         std::to_string(hr_size));
  }
  const HsiCube lr = bicubic_resize(hr, hr.height / scale, hr.width / scale);
  std::vector<PatchPair> out;
  for (std::uint32_t r = 0; r + lr_size <= lr.height; r += stride) {
    for (std::uint32_t c = 0; c + lr_size <= lr.width; c += stride) {
      const std::string tag =
          hr.name + "@" + std::to_string(r * scale) + "," + std::to_string(c * scale);
      PatchPair p;
      p.lr = crop(lr, r, c, lr_size, tag);
      p.hr = crop(hr, r * scale, c * scale, static_cast<std::uint32_t>(hr_size), tag);
      p.row = r * scale;
      p.col = c * scale;
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const auto j = static_cast<std::size_t>(u * static_cast<double>(i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

}  // namespace sdanet
