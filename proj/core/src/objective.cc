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

#include "sdanet/objective.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "sdanet/errors.h"
#include "sdanet/ops.h"

namespace sdanet {

using detail::grad_sink;
using detail::make_result;

namespace {

constexpr double kNormFloor = 1e-8;
constexpr double kCosMargin = 1e-7;

void require_pair(const char* op, const Tensor& pred, const Tensor& gt) {
  if (pred.shape() != gt.shape()) {
    throw DimensionError(std::string(op) + ": prediction " +
                         shape_string(pred.shape()) + " vs ground truth " +
                         shape_string(gt.shape()));
  }
}

}  // namespace

Tensor l1_loss(const Tensor& pred, const Tensor& gt) {
  require_pair("l1_loss", pred, gt);
  const double n = static_cast<double>(pred.numel());
  auto p = pred.data(), g = gt.data();
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - g[i]);
  return make_result("l1_loss", Shape{}, {s / n}, {pred, gt},
                     [pred, gt, n](std::span<const double> grad) {
                       auto p = pred.data(), g = gt.data();
                       auto gp = grad_sink(pred);
                       auto gg = grad_sink(gt);
                       const double w = grad[0] / n;
                       for (std::size_t i = 0; i < p.size(); ++i) {
                         const double d = p[i] - g[i];
                         const double sgn = d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
                         if (!gp.empty()) gp[i] += w * sgn;
                         if (!gg.empty()) gg[i] -= w * sgn;
                       }
                     });
}

Tensor sam_loss(const Tensor& pred, const Tensor& gt) {
  require_pair("sam_loss", pred, gt);
  if (pred.rank() != 4) {
    throw DimensionError("sam_loss: expected (N, B, H, W), got " +
                         shape_string(pred.shape()));
  }
  const std::size_t n = pred.dim(0), bands = pred.dim(1);
  const std::size_t plane = pred.dim(2) * pred.dim(3);
  const std::size_t pixels = n * plane;
  auto p = pred.data(), g = gt.data();

  // Per-pixel cached quantities for the backward pass.
  std::vector<double> cosines(pixels, 0.0);
  std::vector<double> norms_p(pixels, 0.0), norms_g(pixels, 0.0);
  std::vector<std::uint8_t> active(pixels, 0);
  double total = 0.0;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t q = 0; q < plane; ++q) {
      const std::size_t base = s * bands * plane + q;
      double dot = 0.0, pp = 0.0, gg = 0.0;
      for (std::size_t b = 0; b < bands; ++b) {
        const double pv = p[base + b * plane], gv = g[base + b * plane];
        dot += pv * gv;
        pp += pv * pv;
        gg += gv * gv;
      }
      const std::size_t idx = s * plane + q;
      const double np = std::sqrt(pp), ng = std::sqrt(gg);
      if (np < kNormFloor || ng < kNormFloor) continue;
      const double c = dot / (np * ng);
      cosines[idx] = c;
      norms_p[idx] = np;
      norms_g[idx] = ng;
      active[idx] = std::abs(c) < 1.0 - kCosMargin;
      total += std::acos(std::clamp(c, -1.0, 1.0)) / std::numbers::pi;
    }
  const double count = static_cast<double>(pixels);
  return make_result(
      "sam_loss", Shape{}, {total / count}, {pred, gt},
      [=](std::span<const double> grad) {
        auto p = pred.data(), g = gt.data();
        auto gp = grad_sink(pred);
        auto gg = grad_sink(gt);
        for (std::size_t s = 0; s < n; ++s)
          for (std::size_t q = 0; q < plane; ++q) {
            const std::size_t idx = s * plane + q;
            if (!active[idx]) continue;
            const double c = cosines[idx];
            const double np = norms_p[idx], ng = norms_g[idx];
            // d(acos(c)/pi)/dc, scaled by the upstream gradient and 1/count.
            const double dc = -grad[0] /
                              (count * std::numbers::pi * std::sqrt(1.0 - c * c));
            const std::size_t base = s * bands * plane + q;
            for (std::size_t b = 0; b < bands; ++b) {
              const double pv = p[base + b * plane], gv = g[base + b * plane];
              if (!gp.empty())
                gp[base + b * plane] += dc * (gv / (np * ng) - c * pv / (np * np));
              if (!gg.empty())
                gg[base + b * plane] += dc * (pv / (np * ng) - c * gv / (ng * ng));
            }
          }
      });
}

Objective total_loss(const Tensor& pred, const Tensor& gt, double lambda) {
  if (!(lambda >= 0.0)) {
    throw ConfigError("total_loss: lambda must be non-negative");
  }
  Tensor pix = l1_loss(pred, gt);
  Tensor sam = sam_loss(pred, gt);
  Objective out;
  out.total = add(pix, scale(sam, lambda));
  out.breakdown.pix = pix.item();
  out.breakdown.sam = sam.item();
  out.breakdown.total = out.total.item();
  out.breakdown.lambda = lambda;
  return out;
}

}  // namespace sdanet
