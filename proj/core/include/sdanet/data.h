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

#ifndef SDANET_DATA_H_
#define SDANET_DATA_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdanet/errors.h"
#include "sdanet/tensor.h"

namespace sdanet {

// Hyperspectral image with values in [0, 1], stored band-sequentially:
// values[(b * height + y) * width + x].
struct HsiCube {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t bands = 0;
  std::vector<float> values;
  std::string name;

  HsiCube() = default;
  HsiCube(std::uint32_t h, std::uint32_t w, std::uint32_t b, std::string n = {});

  float at(std::size_t band, std::size_t y, std::size_t x) const {
    return values[(band * height + y) * width + x];
  }
  float& at(std::size_t band, std::size_t y, std::size_t x) {
    return values[(band * height + y) * width + x];
  }

  // Throws DomainError when a value is non-finite or outside [0, 1].
  void validate() const;
};

bool operator==(const HsiCube& a, const HsiCube& b);

// "HSI1" file format: magic, u32 H, u32 W, u32 B, u16 name length, UTF-8 name,
// then H*W*B little-endian float32 values in band-sequential order.
std::string cube_bytes(const HsiCube& cube);
HsiCube cube_from_bytes(std::string_view bytes);
void save_cube(const HsiCube& cube, const std::string& path);
HsiCube load_cube(const std::string& path);

// Headerless band-sequential float32 file with externally supplied extents.
HsiCube import_raw(const std::string& path, std::uint32_t height,
                   std::uint32_t width, std::uint32_t bands, std::string name);

// (B, H, W) float64 tensor view of a cube, and back (clamping to [0, 1]).
Tensor cube_to_tensor(const HsiCube& cube);
HsiCube tensor_to_cube(const Tensor& image, std::string name = {});

// Stacks cubes of identical extents into (N, B, H, W).
Tensor stack_cubes(std::span<const HsiCube* const> cubes);

// Separable bicubic resampling (a = -0.5), half-pixel centres, reflected
// borders, each band independently; output clamped to [0, 1].
HsiCube bicubic_resize(const HsiCube& cube, std::uint32_t out_h,
                       std::uint32_t out_w);

// Cubic convolution kernel with a = -0.5.
double bicubic_weight(double x);

struct PatchPair {
  HsiCube lr;
  HsiCube hr;
  std::uint32_t row = 0;  // HR-coordinate offset of the patch
  std::uint32_t col = 0;
};

// Downsamples the whole cube by `scale`, then tiles lr_size x lr_size LR
// patches with `stride` (row-major order) and cuts the matching HR crops.
std::vector<PatchPair> extract_patches(const HsiCube& hr, std::uint32_t lr_size,
                                       std::uint32_t scale, std::uint32_t stride);

// Deterministic seed-driven permutation of [0, n).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

// Shuffles by seed and moves ceil(n * val_fraction) items into the
// validation set.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_train_val(std::vector<T> items,
                                                          double val_fraction,
                                                          std::uint64_t seed) {
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
    throw ConfigError("split_train_val: fraction must lie in [0, 1)");
  }
  const std::size_t n = items.size();
  const auto n_val = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n) * val_fraction - 1e-9));
  const std::vector<std::size_t> order = seeded_permutation(n, seed);
  std::pair<std::vector<T>, std::vector<T>> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto& dst = i < n_val ? out.second : out.first;
    dst.push_back(std::move(items[order[i]]));
  }
  return out;
}

// Linear-mixing synthetic scene: smooth endmember spectra times smooth
// softmax-normalized abundance maps, plus faint straight edges and a
// per-material checkerboard micro-texture.
HsiCube synth_scene(std::uint64_t seed, std::uint32_t height,
                    std::uint32_t width, std::uint32_t bands,
                    std::uint32_t n_endmembers);

// Mean Pearson correlation between adjacent bands (over pixels).
double mean_adjacent_band_correlation(const HsiCube& cube);

}  // namespace sdanet

#endif  // SDANET_DATA_H_
