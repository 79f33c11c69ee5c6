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

#include "sdanet/spectral.h"

#include <gtest/gtest.h>

#include "oracles.h"
#include "sdanet/errors.h"
#include "sdanet/fft.h"
#include "sdanet/ops.h"

namespace sdanet {
namespace {

std::vector<double> plane_of(const Tensor& t, std::size_t index, std::size_t size) {
  auto d = t.data().subspan(index * size, size);
  return {d.begin(), d.end()};
}

TEST(FftPlanTest, MatchesNaiveDftForManyLengths) {
  oracle::Rng rng(30);
  for (std::size_t n : {1u, 2u, 3u, 5u, 7u, 8u, 12u, 16u, 17u, 31u}) {
    std::vector<fft::Complex> x(n);
    for (auto& v : x) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    auto y = x;
    fft::plan_for(n).forward(y);
    for (std::size_t k = 0; k < n; ++k) {
      fft::Complex s = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        s += x[j] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(j * k) /
                                        static_cast<double>(n));
      EXPECT_LT(std::abs(s - y[k]), 1e-10) << "n=" << n << " k=" << k;
    }
    fft::plan_for(n).inverse(y);
    for (std::size_t j = 0; j < n; ++j)
      EXPECT_LT(std::abs(y[j] / static_cast<double>(n) - x[j]), 1e-12);
  }
}

TEST(Fft2Test, ConstantPlaneIsDcOnly) {
  Tensor x({1, 1, 4, 6}, 0.75);
  ComplexGrid g = fft2(x);
  ASSERT_EQ(g.shape(), (Shape{1, 1, 4, 4}));
  EXPECT_EQ(g.width, 6u);
  for (std::size_t i = 0; i < g.re.numel(); ++i) {
    EXPECT_NEAR(g.re.data()[i], i == 0 ? 0.75 * 24 : 0.0, 1e-10);
    EXPECT_NEAR(g.im.data()[i], 0.0, 1e-10);
  }
}

TEST(Fft2Test, ImpulseIsFlat) {
  Tensor x({1, 1, 5, 5});
  x.at(0, 0, 0, 0) = 1.0;
  ComplexGrid g = fft2(x);
  for (std::size_t i = 0; i < g.re.numel(); ++i) {
    EXPECT_NEAR(g.re.data()[i], 1.0, 1e-12);
    EXPECT_NEAR(g.im.data()[i], 0.0, 1e-12);
  }
}

TEST(Fft2Test, MatchesNaiveDft) {
  oracle::Rng rng(31);
  for (auto [h, w] : {std::pair<std::size_t, std::size_t>{8, 8}, {5, 7}, {6, 3}}) {
    Tensor x = oracle::random_tensor({2, 3, h, w}, rng);
    ComplexGrid g = fft2(x);
    const std::size_t wf = w / 2 + 1;
    for (std::size_t p = 0; p < 6; ++p) {
      auto ref = oracle::dft2(plane_of(x, p, h * w), h, w);
      for (std::size_t u = 0; u < h; ++u)
        for (std::size_t v = 0; v < wf; ++v) {
          const std::size_t i = p * h * wf + u * wf + v;
          EXPECT_NEAR(g.re.data()[i], ref[u * w + v].real(), 1e-9);
          EXPECT_NEAR(g.im.data()[i], ref[u * w + v].imag(), 1e-9);
        }
    }
  }
}

TEST(Fft2Test, DcImaginaryIsZero) {
  oracle::Rng rng(32);
  ComplexGrid g = fft2(oracle::random_tensor({1, 4, 6, 5}, rng));
  for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(g.im.at(0, c, 0, 0), 0.0);
}

TEST(Ifft2Test, RoundTrip) {
  oracle::Rng rng(33);
  for (auto [h, w] : {std::pair<std::size_t, std::size_t>{8, 8}, {5, 7}, {1, 4}, {9, 2}}) {
    Tensor x = oracle::random_tensor({2, 2, h, w}, rng);
    Tensor y = ifft2(fft2(x));
    ASSERT_EQ(y.shape(), x.shape());
    EXPECT_LT(oracle::max_abs_diff(y.data(), x.data()), 1e-10);
  }
}

TEST(Ifft2Test, DcOnlyGridGivesConstant) {
  ComplexGrid g{Tensor({1, 1, 4, 3}), Tensor({1, 1, 4, 3}), 5};
  g.re.data()[0] = 20.0 * 0.3;
  Tensor y = ifft2(g);
  ASSERT_EQ(y.shape(), (Shape{1, 1, 4, 5}));
  for (double v : y.data()) EXPECT_NEAR(v, 0.3, 1e-12);
}

TEST(Ifft2Test, MatchesNaiveInverseOnHermitianGrid) {
  oracle::Rng rng(34);
  for (auto [h, w] : {std::pair<std::size_t, std::size_t>{8, 8}, {5, 7}, {4, 6}}) {
    const std::size_t wf = w / 2 + 1;
    // A random spectrum of a real signal, perturbed inside its free bins.
    Tensor src = oracle::random_tensor({1, 1, h, w}, rng);
    ComplexGrid g = fft2(src);
    for (std::size_t u = 0; u < h; ++u)
      for (std::size_t v = 1; v < wf; ++v) {
        if (2 * v == w) continue;
        g.re.data()[u * wf + v] += rng.uniform(-1, 1);
        g.im.data()[u * wf + v] += rng.uniform(-1, 1);
      }
    std::vector<oracle::Complex> half(h * wf);
    for (std::size_t i = 0; i < h * wf; ++i) half[i] = {g.re.data()[i], g.im.data()[i]};
    auto ref = oracle::idft2_half(half, h, w);
    EXPECT_LT(oracle::max_abs_diff(ifft2(g).data(), ref), 1e-9);
    EXPECT_LT(ifft2_imag_residue(g), 1e-10);
  }
}

TEST(SpectralPropertyTest, Linearity) {
  oracle::Rng rng(35);
  Tensor x = oracle::random_tensor({1, 2, 6, 7}, rng);
  Tensor y = oracle::random_tensor({1, 2, 6, 7}, rng);
  const double a = 1.3, b = -0.6;
  ComplexGrid lhs = fft2(add(scale(x, a), scale(y, b)));
  ComplexGrid fx = fft2(x), fy = fft2(y);
  for (std::size_t i = 0; i < lhs.re.numel(); ++i) {
    EXPECT_NEAR(lhs.re.data()[i], a * fx.re.data()[i] + b * fy.re.data()[i], 1e-10);
    EXPECT_NEAR(lhs.im.data()[i], a * fx.im.data()[i] + b * fy.im.data()[i], 1e-10);
  }
}

// Sum of |X|^2 over the full spectrum, reconstructed from the half grid.
double half_energy(const ComplexGrid& g, std::size_t h, std::size_t w) {
  const std::size_t wf = w / 2 + 1;
  double e = 0.0;
  for (std::size_t u = 0; u < h; ++u)
    for (std::size_t v = 0; v < wf; ++v) {
      const double re = g.re.data()[u * wf + v], im = g.im.data()[u * wf + v];
      const bool self_paired = v == 0 || (w % 2 == 0 && v == w / 2);
      e += (self_paired ? 1.0 : 2.0) * (re * re + im * im);
    }
  return e;
}

TEST(SpectralPropertyTest, Parseval) {
  oracle::Rng rng(36);
  for (auto [h, w] : {std::pair<std::size_t, std::size_t>{8, 8}, {5, 7}, {6, 5}}) {
    Tensor x = oracle::random_tensor({1, 1, h, w}, rng);
    double ex = 0.0;
    for (double v : x.data()) ex += v * v;
    const double ef = half_energy(fft2(x), h, w);
    EXPECT_NEAR(ef / (ex * static_cast<double>(h * w)), 1.0, 1e-8);
  }
}

TEST(ComplexDepthwiseConvTest, CenterImpulseIsIdentity) {
  oracle::Rng rng(37);
  ComplexGrid g = fft2(oracle::random_tensor({1, 3, 4, 6}, rng));
  for (std::size_t k : {3u, 5u}) {
    Tensor kernel({3, 1, k, k});
    for (std::size_t c = 0; c < 3; ++c) kernel.at(c, 0, k / 2, k / 2) = 1.0;
    ComplexGrid out = complex_depthwise_conv(g, kernel);
    EXPECT_EQ(out.width, g.width);
    EXPECT_LT(oracle::max_abs_diff(out.re.data(), g.re.data()), 1e-15);
    EXPECT_LT(oracle::max_abs_diff(out.im.data(), g.im.data()), 1e-15);
  }
}

TEST(ComplexDepthwiseConvTest, ZeroKernelGivesZero) {
  oracle::Rng rng(38);
  ComplexGrid g = fft2(oracle::random_tensor({1, 2, 4, 4}, rng));
  ComplexGrid out = complex_depthwise_conv(g, Tensor({2, 1, 3, 3}));
  for (double v : out.re.data()) EXPECT_EQ(v, 0.0);
  for (double v : out.im.data()) EXPECT_EQ(v, 0.0);
}

TEST(ComplexDepthwiseConvTest, MatchesPerPlaneConvolution) {
  oracle::Rng rng(39);
  ComplexGrid g = fft2(oracle::random_tensor({2, 2, 5, 6}, rng));
  Tensor kernel = oracle::random_tensor({2, 1, 3, 3}, rng);
  ComplexGrid out = complex_depthwise_conv(g, kernel);
  std::vector<double> kv(kernel.data().begin(), kernel.data().end());
  for (const auto& [in, res] : {std::pair{&g.re, &out.re}, std::pair{&g.im, &out.im}}) {
    std::vector<double> iv(in->data().begin(), in->data().end());
    auto ref = oracle::conv2d(iv, 2, 2, 5, 4, kv, 2, 3, nullptr, 2, 1);
    EXPECT_LT(oracle::max_abs_diff(res->data(), ref), 1e-12);
  }
}

TEST(ComplexDepthwiseConvTest, EvenKernelRejected) {
  ComplexGrid g = fft2(Tensor({1, 2, 4, 4}));
  EXPECT_THROW(complex_depthwise_conv(g, Tensor({2, 1, 4, 4})), ConfigError);
}

TEST(SplitConcatTest, RoundTripAndOddChannels) {
  oracle::Rng rng(40);
  ComplexGrid g = fft2(oracle::random_tensor({1, 4, 3, 4}, rng));
  auto [a, b] = split_channels(g);
  EXPECT_EQ(a.channels(), 2u);
  ComplexGrid back = concat_channels(a, b);
  EXPECT_EQ(oracle::max_abs_diff(back.re.data(), g.re.data()), 0.0);
  EXPECT_EQ(oracle::max_abs_diff(back.im.data(), g.im.data()), 0.0);
  EXPECT_THROW(split_channels(fft2(Tensor({1, 3, 2, 2}))), ConfigError);
}

}  // namespace
}  // namespace sdanet
