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

#ifndef SDANET_DCSA_H_
#define SDANET_DCSA_H_

#include <cstddef>
#include <vector>

#include "sdanet/ops.h"
#include "sdanet/tensor.h"

namespace sdanet {

// Parameters of one dynamic channel-sparse attention module over C channels.
struct DcsaParams {
  ConvParams q_dconv;     // (C, 1, 3, 3) depthwise
  ConvParams k_dconv;     // (C, 1, 3, 3) depthwise
  ConvParams v_dconv;     // (C, 1, 3, 3) depthwise
  ConvParams gate_dconv;  // (C, 1, 3, 3) depthwise
  ConvParams gate_fc1;    // (ceil(C/4), C, 1, 1)
  ConvParams gate_fc2;    // (1, ceil(C/4), 1, 1)
  ConvParams out_proj;    // (C, C, 1, 1)
};

// How many attention entries per row survive sparsification.
enum class BudgetPolicy {
  kDynamic,    // predicted by the gate from the input
  kFixedFull,  // k = C (dense channel attention)
  kFixedHalf,  // k = floor(C / 2)
};

struct DcsaOptions {
  BudgetPolicy policy = BudgetPolicy::kDynamic;
  // Scale the dynamic output by g / detach(g) so the gate receives gradient.
  // The forward value is unchanged; disabling it leaves only the exact
  // (piecewise-constant) derivative of the forward map.
  bool gate_surrogate = true;
};

// Per-sample gate value g in (0, 1) and the derived budget
// k = clamp(floor(C * g), 1, C).
struct GateDecision {
  Tensor g;  // shape (N); empty handle semantics: numel == N
  std::vector<std::size_t> k_budget;
  bool has_gate = true;  // false for fixed budgets (no g to scale by)
};

struct QkvMatrices {
  Tensor q;     // (N, HW, C)
  Tensor kmat;  // (N, C, HW)
  Tensor v;     // (N, HW, C)
};

// Optional diagnostics of one forward pass.
struct AttentionTrace {
  Tensor weights;  // (N, C, C) softmax weights after masking
  GateDecision gate;
};

std::size_t gate_hidden_channels(std::size_t channels);
std::size_t budget_from_gate(double g, std::size_t channels);

QkvMatrices compute_qkv(const Tensor& features, const DcsaParams& params);

GateDecision dynamic_gate(const Tensor& features, const DcsaParams& params);

GateDecision fixed_budget(std::size_t batch, std::size_t channels,
                          BudgetPolicy policy);

// Channel attention over the C x C map (Kmat Q) / sqrt(HW), keeping the
// k_budget largest logits per row, followed by the output projection.
Tensor sparse_channel_attention(const QkvMatrices& qkv, const GateDecision& gate,
                                const DcsaParams& params, std::size_t height,
                                std::size_t width, bool gate_surrogate = true,
                                AttentionTrace* trace = nullptr);

Tensor dcsa_forward(const Tensor& features, const DcsaParams& params,
                    const DcsaOptions& options = {},
                    AttentionTrace* trace = nullptr);

}  // namespace sdanet

#endif  // SDANET_DCSA_H_
