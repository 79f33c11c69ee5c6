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

#ifndef SDANET_OPS_H_
#define SDANET_OPS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sdanet/tensor.h"

namespace sdanet {

// Elementwise arithmetic on identically shaped tensors.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);

// Full reductions to a rank-0 tensor.
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);

Tensor reshape(const Tensor& x, Shape shape);

// Swaps the two innermost axes of a rank-2 or rank-3 tensor.
Tensor transpose_last2(const Tensor& x);

// Concatenation / slicing along axis 1 (the channel axis for features).
Tensor concat_channels(const std::vector<Tensor>& parts);
Tensor slice_channels(const Tensor& x, std::size_t begin, std::size_t end);

// Multiplies sample n of `x` (axis 0) by `factors[n]`; `factors` has N elements.
Tensor mul_per_sample(const Tensor& x, const Tensor& factors);

// Forward value g / g per element (exactly 1 for finite nonzero g, NaN
// otherwise); backward passes grad / g. This is
// the derivative of g / detach(g) evaluated at the forward point.
Tensor unit_gate(const Tensor& g);

// Stride-1 2-D convolution with symmetric zero padding.
//   input  (N, Cin, H, W)
//   weight (Cout, Cin / groups, KH, KW)
//   bias   (Cout), optional
Tensor conv2d(const Tensor& input, const Tensor& weight,
              const std::optional<Tensor>& bias, std::size_t groups,
              std::size_t padding);

// Matrix product of rank-2 operands, or a batched product of rank-3 operands
// sharing their leading extent.
Tensor matmul(const Tensor& a, const Tensor& b);

// Softmax along the last axis. `mask`, when non-empty, has one entry per
// element; zero entries are excluded and receive exactly zero weight.
Tensor softmax_rows(const Tensor& logits,
                    std::span<const std::uint8_t> mask = {});

// Indices of the k largest entries of `row`, ordered by decreasing value with
// ties resolved toward the lower index.
std::vector<std::size_t> topk_indices(std::span<const double> row,
                                      std::size_t k);

// Row-wise top-k over the last axis of `values` (all leading axes are rows).
std::vector<std::vector<std::size_t>> topk_row_indices(const Tensor& values,
                                                       std::size_t k);

// Normalizes (N, C, H, W) over C at every spatial position, then applies the
// per-channel affine gamma * x + beta.
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps = 1e-6);

enum class Activation { kSigmoid, kGelu };

Tensor activation(const Tensor& x, Activation kind);
inline Tensor sigmoid(const Tensor& x) {
  return activation(x, Activation::kSigmoid);
}
inline Tensor gelu(const Tensor& x) { return activation(x, Activation::kGelu); }

// Arithmetic mean over `axes`; reduced axes are dropped from the shape.
Tensor global_avg_pool(const Tensor& x, std::span<const std::size_t> axes);
inline Tensor global_avg_pool(const Tensor& x,
                              std::initializer_list<std::size_t> axes) {
  return global_avg_pool(x, std::span<const std::size_t>(axes.begin(),
                                                         axes.size()));
}

// out[n, c, h*r + i, w*r + j] = in[n, c*r*r + i*r + j, h, w]
Tensor pixel_shuffle(const Tensor& x, std::size_t r);
// Exact inverse of pixel_shuffle.
Tensor pixel_unshuffle(const Tensor& x, std::size_t r);

// Weight/bias pair of one convolution layer.
struct ConvParams {
  Tensor weight;
  std::optional<Tensor> bias;
};

inline Tensor conv2d(const Tensor& input, const ConvParams& p,
                     std::size_t groups, std::size_t padding) {
  return conv2d(input, p.weight, p.bias, groups, padding);
}

}  // namespace sdanet

#endif  // SDANET_OPS_H_
