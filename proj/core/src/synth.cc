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
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "sdanet/data.h"
#include "sdanet/errors.h"

namespace sdanet {

namespace {

constexpr int kBumpsPerEndmember = 6;
constexpr double kAbundanceSharpness = 4.0;
constexpr int kEdges = 3;
constexpr double kEdgeAmplitude = 0.04;
constexpr double kTextureAmplitude = 0.22;
constexpr std::size_t kSpectralGrid = 64;

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 rng_;
};

// Twice-integrated white noise on a fixed wavelength grid, sampled at band
// centres and rescaled into [lo, hi]. Smoothness does not depend on the
// band count.
std::vector<double> endmember_spectrum(Draw& d, std::uint32_t bands) {
  std::vector<double> grid(kSpectralGrid);
  double level = 0.0, slope = 0.0;
  for (double& g : grid) {
    slope += d.normal();
    level += slope;
    g = level;
  }
  const auto [mn, mx] = std::minmax_element(grid.begin(), grid.end());
  const double lo_v = *mn, span = std::max(*mx - *mn, 1e-12);
  const double lo = d.uniform(0.05, 0.35), hi = d.uniform(0.6, 0.95);
  std::vector<double> s(bands);
  for (std::uint32_t b = 0; b < bands; ++b) {
    const double pos = (b + 0.5) / bands * (kSpectralGrid - 1);
    const auto i = static_cast<std::size_t>(pos);
    const std::size_t j = std::min(i + 1, grid.size() - 1);
    const double v = grid[i] + (pos - i) * (grid[j] - grid[i]);
    s[b] = lo + (hi - lo) * (v - lo_v) / span;
  }
  return s;
}

}  // namespace

HsiCube synth_scene(std::uint64_t seed, std::uint32_t height,
                    std::uint32_t width, std::uint32_t bands,
                    std::uint32_t n_endmembers) {
  if (n_endmembers < 2) {
    throw ConfigError("synth_scene: need at least 2 endmembers, got " +
                      std::to_string(n_endmembers));
  }
  HsiCube cube(height, width, bands, "synth-" + std::to_string(seed));
  Draw d(seed);

  std::vector<std::vector<double>> spectra;
  for (std::uint32_t e = 0; e < n_endmembers; ++e)
    spectra.push_back(endmember_spectrum(d, bands));

  // Material-bound checkerboard micro-texture with a two-pixel period.
  // Strengths are evenly spread over [0, kTextureAmplitude] and assigned to
  // endmembers in seeded order.
  std::vector<double> texture_gain(n_endmembers);
  {
    const std::vector<std::size_t> order = seeded_permutation(n_endmembers, seed);
    for (std::uint32_t e = 0; e < n_endmembers; ++e)
      texture_gain[order[e]] = kTextureAmplitude * e / (n_endmembers - 1);
  }

  const double extent = std::min(height, width);
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  std::vector<double> logits(plane * n_endmembers, 0.0);
  for (std::uint32_t e = 0; e < n_endmembers; ++e) {
    for (int k = 0; k < kBumpsPerEndmember; ++k) {
      const double cy = d.uniform(0.0, height), cx = d.uniform(0.0, width);
      const double sigma = d.uniform(0.05, 0.15) * extent;
      const double amp = kAbundanceSharpness * d.uniform(1.0, 4.0);
      for (std::uint32_t y = 0; y < height; ++y)
        for (std::uint32_t x = 0; x < width; ++x) {
          const double dy = y - cy, dx = x - cx;
          logits[(y * width + x) * n_endmembers + e] +=
              amp * std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
        }
    }
  }

  // Straight brightness edges: each a half-plane step of small amplitude.
  std::vector<double> shade(plane, 1.0);
  for (int k = 0; k < kEdges; ++k) {
    const double theta = d.uniform(0.0, std::numbers::pi);
    const double ny = std::sin(theta), nx = std::cos(theta);
    const double offset = d.uniform(0.25, 0.75);
    const double cy = offset * height, cx = offset * width;
    const double sign = d.uniform() < 0.5 ? -1.0 : 1.0;
    for (std::uint32_t y = 0; y < height; ++y)
      for (std::uint32_t x = 0; x < width; ++x)
        if ((y - cy) * ny + (x - cx) * nx > 0.0)
          shade[y * width + x] += sign * kEdgeAmplitude;
  }

  std::vector<double> abundance(n_endmembers);
  for (std::size_t p = 0; p < plane; ++p) {
    const double* l = &logits[p * n_endmembers];
    const double mx = *std::max_element(l, l + n_endmembers);
    double total = 0.0;
    for (std::uint32_t e = 0; e < n_endmembers; ++e) {
      abundance[e] = std::exp(l[e] - mx);
      total += abundance[e];
    }
    const double checker = (p / width + p % width) % 2 ? -1.0 : 1.0;
    double texture = 0.0;
    for (std::uint32_t e = 0; e < n_endmembers; ++e)
      texture += abundance[e] / total * texture_gain[e] * checker;
    for (std::uint32_t b = 0; b < bands; ++b) {
      double v = 0.0;
      for (std::uint32_t e = 0; e < n_endmembers; ++e)
        v += abundance[e] / total * spectra[e][b];
      cube.values[b * plane + p] =
          static_cast<float>(std::clamp(v * shade[p] * (1.0 + texture), 0.0, 1.0));
    }
  }
  return cube;
}

double mean_adjacent_band_correlation(const HsiCube& cube) {
  if (cube.bands < 2) throw DimensionError("band correlation needs >= 2 bands");
  const std::size_t plane = static_cast<std::size_t>(cube.height) * cube.width;
  const double n = static_cast<double>(plane);
  double total = 0.0;
  for (std::size_t b = 0; b + 1 < cube.bands; ++b) {
    const float* u = &cube.values[b * plane];
    const float* v = &cube.values[(b + 1) * plane];
    double mu = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < plane; ++i) {
      mu += u[i];
      mv += v[i];
    }
    mu /= n;
    mv /= n;
    double cov = 0.0, vu = 0.0, vv = 0.0;
    for (std::size_t i = 0; i < plane; ++i) {
      cov += (u[i] - mu) * (v[i] - mv);
      vu += (u[i] - mu) * (u[i] - mu);
      vv += (v[i] - mv) * (v[i] - mv);
    }
    total += cov / std::sqrt(std::max(vu * vv, 1e-300));
  }
  return total / static_cast<double>(cube.bands - 1);
}

}  // namespace sdanet
