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

#ifndef SDANET_MODEL_H_
#define SDANET_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdanet/dcsa.h"
#include "sdanet/feffn.h"
#include "sdanet/ops.h"
#include "sdanet/tensor.h"

namespace sdanet {

// Structural variants used by the component ablation.
enum class Variant {
  kFull,
  kNoDcsa,      // attention sub-block removed (identity residual)
  kNoFeffn,     // feed-forward sub-block removed (identity residual)
  kFixedKFull,  // attention budget forced to C
  kFixedKHalf,  // attention budget forced to floor(C / 2)
};

std::string_view variant_name(Variant v);
std::optional<Variant> variant_from_name(std::string_view name);

struct SdanetConfig {
  std::uint32_t bands = 0;
  std::uint32_t feat_channels = 64;
  std::uint32_t num_blocks = 6;
  std::uint32_t scale = 4;
  std::uint32_t seed = 0;
  Variant variant = Variant::kFull;

  // Throws ConfigError when a field is out of range.
  void validate() const;
};

struct Parameter {
  std::string name;
  Tensor value;
};

struct NormParams {
  Tensor gamma;
  Tensor beta;
};

struct SdabParams {
  std::optional<NormParams> norm1;
  std::optional<DcsaParams> dcsa;
  std::optional<NormParams> norm2;
  std::optional<FeffnParams> feffn;
};

struct SdanetModel {
  SdanetConfig config;
  ConvParams shallow_conv;   // 3x3 bands -> C
  std::vector<SdabParams> blocks;
  ConvParams recon_conv1;    // 3x3 C -> C
  ConvParams recon_conv2;    // 3x3 C -> C
  ConvParams upsample_conv;  // 3x3 C -> C * scale^2
  ConvParams final_conv;     // 3x3 C -> bands
  // Every trainable tensor with its dotted path, in creation order. Entries
  // alias the tensors held by the fields above.
  std::vector<Parameter> parameters;

  const Parameter* find(std::string_view name) const;
  void zero_grad();
};

struct ForwardOptions {
  bool gate_surrogate = true;
  // When set, receives one trace per attention module in execution order.
  std::vector<AttentionTrace>* traces = nullptr;
};

inline constexpr double kLayerNormEps = 1e-6;

// Deterministic initialization: conv weights U(-sqrt(1/fan_in), +sqrt(1/fan_in)),
// zero biases, unit layer-norm gain and zero shift.
SdanetModel init_params(const SdanetConfig& config);

BudgetPolicy budget_policy(Variant v);

Tensor sdab_forward(const Tensor& features, const SdabParams& block,
                    BudgetPolicy policy, const ForwardOptions& options = {});

// Super-resolves (N, bands, h, w) to (N, bands, h*scale, w*scale). Output is
// not clamped.
Tensor sdanet_forward(const Tensor& lr, const SdanetModel& model,
                      const ForwardOptions& options = {});

std::size_t count_params(const SdanetModel& model);

// Checkpoint codec. Little-endian: "SDAN", u32 version, five u32 config
// fields (bands, C, blocks, scale, seed), u32 parameter count, then per
// parameter u16 name length, UTF-8 name, u8 rank, u32 extents, f64 values.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string checkpoint_bytes(const SdanetModel& model);
SdanetModel model_from_checkpoint(std::string_view bytes,
                                  Variant variant = Variant::kFull);
void save_checkpoint(const SdanetModel& model, const std::string& path);
SdanetModel load_checkpoint(const std::string& path,
                            Variant variant = Variant::kFull);

}  // namespace sdanet

#endif  // SDANET_MODEL_H_
