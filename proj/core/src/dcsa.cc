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

#include "sdanet/dcsa.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "sdanet/errors.h"

namespace sdanet {

namespace {

void require_features(const char* op, const Tensor& f) {
  if (f.rank() != 4) {
    throw DimensionError(std::string(op) +
                         ": features must be rank 4 (N, C, H, W), got " +
                         shape_string(f.shape()));
  }
}

// (N, C, H, W) -> (N, HW, C)
Tensor tokens_by_channel(const Tensor& x) {
  const std::size_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
  return transpose_last2(reshape(x, Shape{n, c, hw}));
}

}  // namespace

std::size_t gate_hidden_channels(std::size_t channels) {
  return (channels + 3) / 4;
}

std::size_t budget_from_gate(double g, std::size_t channels) {
  const double raw = std::floor(static_cast<double>(channels) * g);
  if (!(raw >= 1.0)) return 1;
  return std::min(channels, static_cast<std::size_t>(raw));
}

QkvMatrices compute_qkv(const Tensor& features, const DcsaParams& params) {
  require_features("compute_qkv", features);
  const std::size_t c = features.dim(1);
  const std::size_t n = features.dim(0), hw = features.dim(2) * features.dim(3);
  QkvMatrices out;
  out.q = tokens_by_channel(conv2d(features, params.q_dconv, c, 1));
  out.kmat = reshape(conv2d(features, params.k_dconv, c, 1), Shape{n, c, hw});
  out.v = tokens_by_channel(conv2d(features, params.v_dconv, c, 1));
  return out;
}

GateDecision dynamic_gate(const Tensor& features, const DcsaParams& params) {
  require_features("dynamic_gate", features);
  const std::size_t c = features.dim(1);
  Tensor local = conv2d(features, params.gate_dconv, c, 1);
  Tensor hidden = gelu(conv2d(local, params.gate_fc1, 1, 0));
  Tensor score = sigmoid(conv2d(hidden, params.gate_fc2, 1, 0));  // (N,1,H,W)
  GateDecision gate;
  gate.g = global_avg_pool(score, {1, 2, 3});
  for (double g : gate.g.data()) gate.k_budget.push_back(budget_from_gate(g, c));
  return gate;
}

GateDecision fixed_budget(std::size_t batch, std::size_t channels,
                          BudgetPolicy policy) {
  GateDecision gate;
  gate.has_gate = false;
  gate.g = Tensor(Shape{batch}, 1.0);
  std::size_t k = channels;
  if (policy == BudgetPolicy::kFixedHalf) k = std::max<std::size_t>(1, channels / 2);
  gate.k_budget.assign(batch, k);
  return gate;
}

Tensor sparse_channel_attention(const QkvMatrices& qkv, const GateDecision& gate,
                                const DcsaParams& params, std::size_t height,
                                std::size_t width, bool gate_surrogate,
                                AttentionTrace* trace) {
  const std::size_t n = qkv.kmat.dim(0), c = qkv.kmat.dim(1);
  const std::size_t hw = qkv.kmat.dim(2);
  if (hw != height * width || qkv.q.shape() != Shape{n, hw, c} ||
      qkv.v.shape() != Shape{n, hw, c}) {
    throw DimensionError("sparse_channel_attention: Q/K/V shapes disagree");
  }
  if (gate.k_budget.size() != n) {
    throw DimensionError("sparse_channel_attention: gate has " +
                         std::to_string(gate.k_budget.size()) +
                         " budgets for batch " + std::to_string(n));
  }
  const double temperature = 1.0 / std::sqrt(static_cast<double>(hw));
  Tensor logits = scale(matmul(qkv.kmat, qkv.q), temperature);  // (N, C, C)

  std::vector<std::uint8_t> mask(n * c * c, 0);
  auto lv = logits.data();
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t k = gate.k_budget[s];
    if (k < 1 || k > c) {
      throw ConfigError("sparse_channel_attention: k_budget " +
                        std::to_string(k) + " outside [1, " + std::to_string(c) +
                        "]");
    }
    for (std::size_t r = 0; r < c; ++r) {
      const std::size_t off = (s * c + r) * c;
      for (std::size_t j : topk_indices(lv.subspan(off, c), k)) mask[off + j] = 1;
    }
  }
  Tensor weights = softmax_rows(logits, mask);
  // (N, C, C) x (N, C, HW) -> (N, C, HW)
  Tensor mixed = matmul(weights, transpose_last2(qkv.v));
  Tensor out = conv2d(reshape(mixed, Shape{n, c, height, width}),
                      params.out_proj, 1, 0);
  if (gate.has_gate && gate_surrogate) out = mul_per_sample(out, unit_gate(gate.g));
  if (trace) {
    trace->weights = weights;
    trace->gate = gate;
  }
  return out;
}

Tensor dcsa_forward(const Tensor& features, const DcsaParams& params,
                    const DcsaOptions& options, AttentionTrace* trace) {
  require_features("dcsa_forward", features);
  const std::size_t n = features.dim(0), c = features.dim(1);
  QkvMatrices qkv = compute_qkv(features, params);
  GateDecision gate = options.policy == BudgetPolicy::kDynamic
                          ? dynamic_gate(features, params)
                          : fixed_budget(n, c, options.policy);
  return sparse_channel_attention(qkv, gate, params, features.dim(2),
                                  features.dim(3), options.gate_surrogate, trace);
}

}  // namespace sdanet
