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

#include "sdanet/model.h"

#include <array>
#include <cmath>
#include <random>
#include <string>

#include "sdanet/errors.h"

namespace sdanet {

namespace {

constexpr std::array<std::pair<Variant, std::string_view>, 5> kVariantNames{{
    {Variant::kFull, "full"},
    {Variant::kNoDcsa, "no_dcsa"},
    {Variant::kNoFeffn, "no_feffn"},
    {Variant::kFixedKFull, "fixed_k_full"},
    {Variant::kFixedKHalf, "fixed_k_half"},
}};

// Creates parameters in a fixed order from one seeded stream.
class ParamFactory {
 public:
  ParamFactory(std::uint64_t seed, std::vector<Parameter>& registry)
      : rng_(seed), registry_(registry) {}

  Tensor uniform(const std::string& name, Shape shape, std::size_t fan_in) {
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    Tensor t(std::move(shape));
    for (double& v : t.data()) v = (2.0 * canonical() - 1.0) * bound;
    return add(name, std::move(t));
  }

  Tensor constant(const std::string& name, Shape shape, double value) {
    return add(name, Tensor(std::move(shape), value));
  }

  ConvParams conv(const std::string& name, std::size_t out_ch,
                  std::size_t in_per_group, std::size_t k) {
    ConvParams p;
    p.weight = uniform(name + ".weight", Shape{out_ch, in_per_group, k, k},
                       in_per_group * k * k);
    p.bias = constant(name + ".bias", Shape{out_ch}, 0.0);
    return p;
  }

  NormParams norm(const std::string& name, std::size_t channels) {
    return NormParams{constant(name + ".gamma", Shape{channels}, 1.0),
                      constant(name + ".beta", Shape{channels}, 0.0)};
  }

 private:
  // 53 random mantissa bits; identical on every conforming platform.
  double canonical() {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

  Tensor add(const std::string& name, Tensor t) {
    t.set_requires_grad(true);
    registry_.push_back(Parameter{name, t});
    return t;
  }

  std::mt19937_64 rng_;
  std::vector<Parameter>& registry_;
};

DcsaParams make_dcsa(ParamFactory& f, const std::string& prefix,
                     std::size_t c) {
  const std::size_t hidden = gate_hidden_channels(c);
  DcsaParams p;
  p.q_dconv = f.conv(prefix + ".q_dconv", c, 1, 3);
  p.k_dconv = f.conv(prefix + ".k_dconv", c, 1, 3);
  p.v_dconv = f.conv(prefix + ".v_dconv", c, 1, 3);
  p.gate_dconv = f.conv(prefix + ".gate_dconv", c, 1, 3);
  p.gate_fc1 = f.conv(prefix + ".gate_fc1", hidden, c, 1);
  p.gate_fc2 = f.conv(prefix + ".gate_fc2", 1, hidden, 1);
  p.out_proj = f.conv(prefix + ".out_proj", c, c, 1);
  return p;
}

FeffnParams make_feffn(ParamFactory& f, const std::string& prefix,
                       std::size_t c) {
  const std::size_t e = kFeffnExpansion * c;
  FeffnParams p;
  p.expand_proj = f.conv(prefix + ".expand_proj", e, c, 1);
  p.freq_kernel_5 = f.uniform(prefix + ".freq_kernel_5", Shape{e, 1, 5, 5}, 25);
  p.freq_kernel_3 = f.uniform(prefix + ".freq_kernel_3", Shape{e, 1, 3, 3}, 9);
  p.spatial_dconv_5 = f.conv(prefix + ".spatial_dconv_5", e, 1, 5);
  p.spatial_dconv_3 = f.conv(prefix + ".spatial_dconv_3", e, 1, 3);
  p.out_proj = f.conv(prefix + ".out_proj", c, 2 * e, 1);
  return p;
}

}  // namespace

std::string_view variant_name(Variant v) {
  for (const auto& [variant, name] : kVariantNames)
    if (variant == v) return name;
  return "unknown";
}

std::optional<Variant> variant_from_name(std::string_view name) {
  for (const auto& [variant, n] : kVariantNames)
    if (n == name) return variant;
  return std::nullopt;
}

void SdanetConfig::validate() const {
  if (bands == 0) throw ConfigError("config: bands must be positive");
  if (feat_channels == 0 || feat_channels % 2 != 0) {
    throw ConfigError("config: feat_channels must be a positive even number, got " +
                      std::to_string(feat_channels));
  }
  if (num_blocks == 0) throw ConfigError("config: num_blocks must be >= 1");
  if (scale != 2 && scale != 4 && scale != 8) {
    throw ConfigError("config: scale must be 2, 4 or 8, got " +
                      std::to_string(scale));
  }
}

const Parameter* SdanetModel::find(std::string_view name) const {
  for (const Parameter& p : parameters)
    if (p.name == name) return &p;
  return nullptr;
}

void SdanetModel::zero_grad() {
  for (Parameter& p : parameters) p.value.zero_grad();
}

BudgetPolicy budget_policy(Variant v) {
  switch (v) {
    case Variant::kFixedKFull:
      return BudgetPolicy::kFixedFull;
    case Variant::kFixedKHalf:
      return BudgetPolicy::kFixedHalf;
    default:
      return BudgetPolicy::kDynamic;
  }
}

SdanetModel init_params(const SdanetConfig& config) {
  config.validate();
  SdanetModel m;
  m.config = config;
  ParamFactory f(config.seed, m.parameters);
  const std::size_t c = config.feat_channels;
  const std::size_t s = config.scale;
  m.shallow_conv = f.conv("shallow_conv", c, config.bands, 3);
  for (std::size_t b = 0; b < config.num_blocks; ++b) {
    const std::string prefix = "blocks." + std::to_string(b);
    SdabParams block;
    if (config.variant != Variant::kNoDcsa) {
      block.norm1 = f.norm(prefix + ".norm1", c);
      block.dcsa = make_dcsa(f, prefix + ".dcsa", c);
    }
    if (config.variant != Variant::kNoFeffn) {
      block.norm2 = f.norm(prefix + ".norm2", c);
      block.feffn = make_feffn(f, prefix + ".feffn", c);
    }
    m.blocks.push_back(std::move(block));
  }
  m.recon_conv1 = f.conv("recon_conv1", c, c, 3);
  m.recon_conv2 = f.conv("recon_conv2", c, c, 3);
  m.upsample_conv = f.conv("upsample_conv", c * s * s, c, 3);
  m.final_conv = f.conv("final_conv", config.bands, c, 3);
  return m;
}

Tensor sdab_forward(const Tensor& features, const SdabParams& block,
                    BudgetPolicy policy, const ForwardOptions& options) {
  Tensor x = features;
  if (block.dcsa) {
    Tensor normed = layer_norm(x, block.norm1->gamma, block.norm1->beta,
                               kLayerNormEps);
    AttentionTrace trace;
    DcsaOptions dopts{policy, options.gate_surrogate};
    Tensor attn = dcsa_forward(normed, *block.dcsa, dopts,
                               options.traces ? &trace : nullptr);
    if (options.traces) options.traces->push_back(std::move(trace));
    x = add(x, attn);
  }
  if (block.feffn) {
    Tensor normed = layer_norm(x, block.norm2->gamma, block.norm2->beta,
                               kLayerNormEps);
    x = add(x, feffn_forward(normed, *block.feffn));
  }
  return x;
}

Tensor sdanet_forward(const Tensor& lr, const SdanetModel& model,
                      const ForwardOptions& options) {
  if (lr.rank() != 4) {
    throw ConfigError("sdanet_forward: input must be rank 4 (N, bands, h, w), got " +
                      shape_string(lr.shape()));
  }
  if (lr.dim(1) != model.config.bands) {
    throw ConfigError("sdanet_forward: input has " + std::to_string(lr.dim(1)) +
                      " bands, model expects " +
                      std::to_string(model.config.bands));
  }
  const BudgetPolicy policy = budget_policy(model.config.variant);
  Tensor shallow = conv2d(lr, model.shallow_conv, 1, 1);
  Tensor deep = shallow;
  for (const SdabParams& block : model.blocks)
    deep = sdab_forward(deep, block, policy, options);
  Tensor fused = add(deep, shallow);
  Tensor refined = conv2d(conv2d(fused, model.recon_conv1, 1, 1),
                          model.recon_conv2, 1, 1);
  Tensor up = pixel_shuffle(conv2d(refined, model.upsample_conv, 1, 1),
                            model.config.scale);
  return conv2d(up, model.final_conv, 1, 1);
}

std::size_t count_params(const SdanetModel& model) {
  std::size_t total = 0;
  for (const Parameter& p : model.parameters) total += p.value.numel();
  return total;
}

}  // namespace sdanet
