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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "dcsa_reference.h"
#include "oracles.h"
#include "sdanet/diagnostics.h"
#include "sdanet/errors.h"
#include "sdanet/objective.h"

namespace sdanet {
namespace {

SdanetConfig tiny(Variant v = Variant::kFull) {
  SdanetConfig c;
  c.bands = 3;
  c.feat_channels = 8;
  c.num_blocks = 1;
  c.scale = 2;
  c.seed = 5;
  c.variant = v;
  return c;
}

// Parameter count written out layer by layer.
std::size_t closed_form_count(std::size_t bands, std::size_t c, std::size_t blocks,
                              std::size_t s, Variant v) {
  const std::size_t h = (c + 3) / 4, e = 2 * c;
  const std::size_t dcsa = 2 * c + 4 * (9 * c + c) + (h * c + h) + (h + 1) + (c * c + c);
  const std::size_t feffn = 2 * c + (e * c + e) + 25 * e + 9 * e + (25 * e + e) +
                            (9 * e + e) + (c * 2 * e + c);
  std::size_t per_block = 0;
  if (v != Variant::kNoDcsa) per_block += dcsa;
  if (v != Variant::kNoFeffn) per_block += feffn;
  return (9 * bands * c + c) + blocks * per_block + 2 * (9 * c * c + c) +
         (9 * c * c * s * s + c * s * s) + (9 * c * bands + bands);
}

std::vector<double> flat(const SdanetModel& m) {
  std::vector<double> out;
  for (const Parameter& p : m.parameters)
    out.insert(out.end(), p.value.data().begin(), p.value.data().end());
  return out;
}

TEST(InitTest, DeterministicPerSeed) {
  EXPECT_EQ(flat(init_params(tiny())), flat(init_params(tiny())));
  SdanetConfig other = tiny();
  other.seed = 6;
  EXPECT_NE(flat(init_params(tiny())), flat(init_params(other)));
}

TEST(InitTest, RangesAndConstants) {
  SdanetModel m = init_params(tiny());
  for (const Parameter& p : m.parameters) {
    EXPECT_TRUE(p.value.requires_grad());
    const std::string& n = p.name;
    auto ends = [&n](const std::string& s) {
      return n.size() >= s.size() && n.compare(n.size() - s.size(), s.size(), s) == 0;
    };
    for (double v : p.value.data()) {
      ASSERT_TRUE(std::isfinite(v));
      if (ends(".bias") || ends(".beta")) {
        EXPECT_EQ(v, 0.0) << n;
      }
      if (ends(".gamma")) {
        EXPECT_EQ(v, 1.0) << n;
      }
    }
    if (p.value.rank() == 4) {
      const std::size_t fan_in = p.value.dim(1) * p.value.dim(2) * p.value.dim(3);
      const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
      for (double v : p.value.data()) EXPECT_LE(std::abs(v), bound) << n;
    }
  }
}

TEST(InitTest, RegistryNamesUniqueAndDotted) {
  SdanetModel m = init_params(tiny());
  std::set<std::string> names;
  for (const Parameter& p : m.parameters) {
    EXPECT_TRUE(names.insert(p.name).second) << p.name;
    EXPECT_NE(p.name.find('.'), std::string::npos);
  }
  EXPECT_NE(m.find("blocks.0.dcsa.gate_fc2.bias"), nullptr);
  EXPECT_EQ(m.find("blocks.1.dcsa.gate_fc2.bias"), nullptr);
}

TEST(InitTest, ConfigValidation) {
  SdanetConfig c = tiny();
  c.scale = 3;
  EXPECT_THROW(init_params(c), ConfigError);
  c = tiny();
  c.feat_channels = 7;
  EXPECT_THROW(init_params(c), ConfigError);
  c = tiny();
  c.num_blocks = 0;
  EXPECT_THROW(init_params(c), ConfigError);
  c = tiny();
  c.bands = 0;
  EXPECT_THROW(init_params(c), ConfigError);
}

TEST(CountParamsTest, ClosedFormAndRegistryWalk) {
  for (Variant v : {Variant::kFull, Variant::kNoDcsa, Variant::kNoFeffn,
                    Variant::kFixedKFull, Variant::kFixedKHalf}) {
    SdanetConfig c;
    c.bands = 8;
    c.feat_channels = 16;
    c.num_blocks = 2;
    c.scale = 2;
    c.variant = v;
    SdanetModel m = init_params(c);
    std::size_t walk = 0;
    for (const Parameter& p : m.parameters) walk += p.value.numel();
    EXPECT_EQ(count_params(m), walk);
    EXPECT_EQ(count_params(m), closed_form_count(8, 16, 2, 2, v)) << variant_name(v);
  }
  SdanetConfig d;
  d.bands = 31;
  EXPECT_EQ(count_params(init_params(d)), closed_form_count(31, 64, 6, 4, Variant::kFull));
}

TEST(CountParamsTest, SingleConvAndBlockAdditivity) {
  SdanetConfig c = tiny();
  const std::size_t one = count_params(init_params(c));
  c.num_blocks = 2;
  const std::size_t two = count_params(init_params(c));
  c.num_blocks = 4;
  EXPECT_EQ(count_params(init_params(c)) - two, 2 * (two - one));
  SdanetModel m = init_params(tiny());
  // A 3x3 conv 1 -> 1 with bias holds 10 values.
  SdanetConfig single = tiny();
  single.bands = 1;
  single.feat_channels = 2;
  SdanetModel s1 = init_params(single);
  EXPECT_EQ(s1.find("final_conv.weight")->value.numel() / 2 +
                s1.find("final_conv.bias")->value.numel(),
            10u);
  EXPECT_EQ(m.find("shallow_conv.weight")->value.numel() +
                m.find("shallow_conv.bias")->value.numel(),
            9u * 3 * 8 + 8);
}

TEST(VariantTest, ParameterOrderingsAndNameDiff) {
  const std::size_t full = count_params(init_params(tiny()));
  EXPECT_LT(count_params(init_params(tiny(Variant::kNoDcsa))), full);
  EXPECT_LT(count_params(init_params(tiny(Variant::kNoFeffn))), full);
  EXPECT_EQ(count_params(init_params(tiny(Variant::kFixedKFull))), full);
  EXPECT_EQ(count_params(init_params(tiny(Variant::kFixedKHalf))), full);

  auto names = [](Variant v) {
    std::set<std::string> s;
    for (const Parameter& p : init_params(tiny(v)).parameters) s.insert(p.name);
    return s;
  };
  const auto all = names(Variant::kFull);
  for (auto [v, removed] : {std::pair{Variant::kNoDcsa, std::string("blocks.0.dcsa.")},
                            std::pair{Variant::kNoFeffn, std::string("blocks.0.feffn.")}}) {
    const auto kept = names(v);
    const std::string norm = v == Variant::kNoDcsa ? "blocks.0.norm1." : "blocks.0.norm2.";
    for (const std::string& n : all) {
      const bool gone = n.rfind(removed, 0) == 0 || n.rfind(norm, 0) == 0;
      EXPECT_EQ(kept.count(n) == 0, gone) << n;
    }
    EXPECT_LE(kept.size(), all.size());
  }
  EXPECT_EQ(names(Variant::kFixedKFull), all);
}

TEST(VariantTest, NamesRoundTrip) {
  for (Variant v : {Variant::kFull, Variant::kNoDcsa, Variant::kNoFeffn,
                    Variant::kFixedKFull, Variant::kFixedKHalf})
    EXPECT_EQ(variant_from_name(variant_name(v)), v);
  EXPECT_EQ(variant_name(Variant::kFixedKHalf), "fixed_k_half");
  EXPECT_FALSE(variant_from_name("bogus").has_value());
}

TEST(ForwardTest, ShapeContractForEveryScale) {
  for (std::uint32_t s : {2u, 4u, 8u}) {
    SdanetConfig c = tiny();
    c.scale = s;
    SdanetModel m = init_params(c);
    for (auto [h, w] : {std::pair<std::size_t, std::size_t>{3, 3}, {4, 5}, {2, 6}}) {
      Tensor out = sdanet_forward(Tensor({2, 3, h, w}, 0.3), m);
      EXPECT_EQ(out.shape(), (Shape{2, 3, h * s, w * s}));
    }
  }
}

TEST(ForwardTest, InputErrors) {
  SdanetModel m = init_params(tiny());
  EXPECT_THROW(sdanet_forward(Tensor({3, 4, 4}), m), ConfigError);
  EXPECT_THROW(sdanet_forward(Tensor({1, 4, 4, 4}), m), ConfigError);
}

TEST(ForwardTest, DeterministicBitwise) {
  oracle::Rng rng(80);
  SdanetModel m = init_params(tiny());
  Tensor lr = oracle::random_tensor({2, 3, 4, 4}, rng, 0, 1);
  auto a = sdanet_forward(lr, m), b = sdanet_forward(lr, m);
  EXPECT_EQ(oracle::max_abs_diff(a.data(), b.data()), 0.0);
}

void zero_output_projections(SdanetModel& m) {
  for (SdabParams& b : m.blocks) {
    if (b.dcsa) {
      for (double& v : b.dcsa->out_proj.weight.data()) v = 0.0;
      for (double& v : b.dcsa->out_proj.bias->data()) v = 0.0;
    }
    if (b.feffn) {
      for (double& v : b.feffn->out_proj.weight.data()) v = 0.0;
      for (double& v : b.feffn->out_proj.bias->data()) v = 0.0;
    }
  }
}

TEST(SdabTest, ZeroProjectionsGiveIdentity) {
  oracle::Rng rng(81);
  SdanetConfig c = tiny();
  c.num_blocks = 3;
  SdanetModel m = init_params(c);
  zero_output_projections(m);
  Tensor f = oracle::random_tensor({2, 8, 4, 4}, rng);
  for (const SdabParams& b : m.blocks) {
    Tensor out = sdab_forward(f, b, BudgetPolicy::kDynamic);
    EXPECT_EQ(oracle::max_abs_diff(out.data(), f.data()), 0.0);
    EXPECT_EQ(out.shape(), f.shape());
  }
}

TEST(SdabTest, LongSkipPassThrough) {
  oracle::Rng rng(82);
  SdanetConfig c = tiny();
  c.num_blocks = 2;
  SdanetModel m = init_params(c);
  zero_output_projections(m);
  Tensor lr = oracle::random_tensor({1, 3, 4, 4}, rng, 0, 1);
  Tensor s = conv2d(lr, m.shallow_conv, 1, 1);
  Tensor f = conv2d(conv2d(scale(s, 2.0), m.recon_conv1, 1, 1), m.recon_conv2, 1, 1);
  Tensor expected = conv2d(pixel_shuffle(conv2d(f, m.upsample_conv, 1, 1), 2),
                           m.final_conv, 1, 1);
  EXPECT_LT(oracle::max_abs_diff(sdanet_forward(lr, m).data(), expected.data()), 1e-12);
}

TEST(SdabTest, FixedFullMatchesDenseReferenceForward) {
  oracle::Rng rng(83);
  SdanetConfig c = tiny(Variant::kFixedKFull);
  c.num_blocks = 2;
  SdanetModel m = init_params(c);
  Tensor lr = oracle::random_tensor({2, 3, 4, 4}, rng, 0, 1);
  Tensor x = conv2d(lr, m.shallow_conv, 1, 1);
  const Tensor shallow = x;
  for (const SdabParams& b : m.blocks) {
    Tensor normed = layer_norm(x, b.norm1->gamma, b.norm1->beta, kLayerNormEps);
    x = add(x, Tensor(x.shape(), reference::dense_attention(normed, *b.dcsa)));
    Tensor n2 = layer_norm(x, b.norm2->gamma, b.norm2->beta, kLayerNormEps);
    x = add(x, feffn_forward(n2, *b.feffn));
  }
  Tensor f = conv2d(conv2d(add(x, shallow), m.recon_conv1, 1, 1), m.recon_conv2, 1, 1);
  Tensor expected = conv2d(pixel_shuffle(conv2d(f, m.upsample_conv, 1, 1), 2),
                           m.final_conv, 1, 1);
  EXPECT_LT(oracle::max_abs_diff(sdanet_forward(lr, m).data(), expected.data()), 1e-12);
}

TEST(GradientTest, ModulesAndTinyModel) {
  GradCheckOptions opt;
  opt.eps = 1e-5;
  opt.abs_floor = 1e-6;
  for (Variant v : {Variant::kFull, Variant::kFixedKHalf}) {
    auto reports = gradcheck_modules(tiny(v), 4, 9, opt);
    ASSERT_EQ(reports.size(), 4u);
    for (const auto& r : reports)
      EXPECT_LT(r.result.max_rel_error, 1e-4) << format_grad_report(r);
  }
}

TEST(GradientTest, AllParametersReceiveGradient) {
  oracle::Rng rng(84);
  SdanetModel m = init_params(tiny());
  for (Parameter& p : m.parameters)
    for (double& v : p.value.data()) v += rng.uniform(-0.05, 0.05);
  Tensor lr = oracle::random_tensor({2, 3, 4, 4}, rng, 0, 1);
  Tensor gt = oracle::random_tensor({2, 3, 8, 8}, rng, 0, 1);
  backward(total_loss(sdanet_forward(lr, m), gt).total);
  for (const Parameter& p : m.parameters) {
    ASSERT_TRUE(p.value.has_grad()) << p.name;
    double mag = 0.0;
    for (double g : p.value.grad()) mag += std::abs(g);
    EXPECT_GT(mag, 0.0) << p.name;
  }
}

class CheckpointTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("sdanet_ckpt_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(CheckpointTest, RoundTripBitwise) {
  oracle::Rng rng(85);
  SdanetModel m = init_params(tiny());
  for (Parameter& p : m.parameters)
    for (double& v : p.value.data()) v += rng.uniform(-1, 1) * 1e-3;
  const std::string path = (dir_ / "m.ckpt").string();
  save_checkpoint(m, path);
  SdanetModel back = load_checkpoint(path);
  EXPECT_EQ(flat(back), flat(m));
  EXPECT_EQ(checkpoint_bytes(back), checkpoint_bytes(m));
  EXPECT_EQ(back.config.seed, m.config.seed);
  Tensor lr = oracle::random_tensor({1, 3, 4, 4}, rng, 0, 1);
  EXPECT_EQ(oracle::max_abs_diff(sdanet_forward(lr, back).data(),
                                 sdanet_forward(lr, m).data()),
            0.0);
}

TEST_F(CheckpointTest, HeaderLayout) {
  SdanetModel m = init_params(tiny());
  const std::string bytes = checkpoint_bytes(m);
  ASSERT_GE(bytes.size(), 32u);
  EXPECT_EQ(bytes.substr(0, 4), "SDAN");
  auto u32 = [&bytes](std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(bytes[off + i]);
    return v;
  };
  EXPECT_EQ(u32(4), kCheckpointVersion);
  EXPECT_EQ(u32(8), 3u);
  EXPECT_EQ(u32(12), 8u);
  EXPECT_EQ(u32(16), 1u);
  EXPECT_EQ(u32(20), 2u);
  EXPECT_EQ(u32(24), 5u);
  EXPECT_EQ(u32(28), m.parameters.size());
  std::size_t expected = 32;
  for (const Parameter& p : m.parameters)
    expected += 2 + p.name.size() + 1 + 4 * p.value.rank() + 8 * p.value.numel();
  EXPECT_EQ(bytes.size(), expected);
}

TEST_F(CheckpointTest, CorruptionRejected) {
  const std::string good = checkpoint_bytes(init_params(tiny()));
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_THROW(model_from_checkpoint(bad_magic), FormatError);
  std::string bad_version = good;
  bad_version[4] = 9;
  EXPECT_THROW(model_from_checkpoint(bad_version), FormatError);
  for (std::size_t cut : {std::size_t{2}, std::size_t{20}, good.size() / 2, good.size() - 1})
    EXPECT_THROW(model_from_checkpoint(good.substr(0, cut)), FormatError) << cut;
  EXPECT_THROW(model_from_checkpoint(good + "x"), FormatError);
  EXPECT_THROW(model_from_checkpoint(good, Variant::kNoDcsa), FormatError);
  EXPECT_THROW(load_checkpoint((dir_ / "missing.ckpt").string()), FormatError);
}

TEST_F(CheckpointTest, NonFiniteValueRejected) {
  SdanetModel m = init_params(tiny());
  m.parameters.back().value.data()[0] = std::nan("");
  EXPECT_THROW(model_from_checkpoint(checkpoint_bytes(m)), FormatError);
}

TEST_F(CheckpointTest, SaveToMissingDirectoryIsIoError) {
  EXPECT_THROW(save_checkpoint(init_params(tiny()), (dir_ / "no" / "x.ckpt").string()),
               IoError);
}

}  // namespace
}  // namespace sdanet
