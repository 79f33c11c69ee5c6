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

#include "sdanet/metrics.h"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.h"
#include "sdanet/data.h"
#include "sdanet/errors.h"

namespace sdanet {
namespace {

std::vector<double> vec(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

TEST(MetricsTest, PerfectReconstruction) {
  oracle::Rng rng(100);
  Tensor gt = oracle::random_tensor({4, 8, 8}, rng, 0, 1);
  MetricsReport r = evaluate_all(gt, gt, 4);
  EXPECT_EQ(r.psnr, 100.0);
  EXPECT_NEAR(r.ssim, 1.0, 1e-12);
  EXPECT_EQ(r.sam_deg, 0.0);
  EXPECT_NEAR(r.cc, 1.0, 1e-12);
  EXPECT_EQ(r.ergas, 0.0);
  EXPECT_EQ(r.scale, 4u);
}

TEST(MetricsTest, ConstantOffsetGivesTwentyDb) {
  oracle::Rng rng(101);
  Tensor gt = oracle::random_tensor({3, 6, 6}, rng, 0.2, 0.8);
  Tensor pred = gt.detach();
  for (double& v : pred.data()) v += 0.1;
  EXPECT_NEAR(metric_psnr(pred, gt), 20.0, 1e-6);
}

TEST(MetricsTest, MatchLoopOracles) {
  oracle::Rng rng(102);
  for (auto [b, h, w] : {std::tuple<std::size_t, std::size_t, std::size_t>{3, 4, 4},
                         {4, 8, 8}, {2, 13, 7}}) {
    for (int trial = 0; trial < 5; ++trial) {
      Tensor gt = oracle::random_tensor({b, h, w}, rng, 0, 1);
      Tensor pred = oracle::random_tensor({b, h, w}, rng, 0, 1);
      const auto p = vec(pred), g = vec(gt);
      EXPECT_NEAR(metric_psnr(pred, gt), oracle::psnr(p, g, b, h * w), 1e-8);
      EXPECT_NEAR(metric_ssim(pred, gt), oracle::ssim(p, g, b, h, w), 1e-8);
      EXPECT_NEAR(metric_sam(pred, gt), oracle::sam_degrees(p, g, b, h * w), 1e-8);
      EXPECT_NEAR(metric_cc(pred, gt), oracle::cc(p, g, b, h * w), 1e-8);
      EXPECT_NEAR(metric_ergas(pred, gt, 4), oracle::ergas(p, g, b, h * w, 4), 1e-8);
    }
  }
}

TEST(MetricsTest, RangesAndSymmetry) {
  oracle::Rng rng(103);
  Tensor a = oracle::random_tensor({3, 8, 8}, rng, 0, 1);
  Tensor b = oracle::random_tensor({3, 8, 8}, rng, 0, 1);
  MetricsReport r = evaluate_all(a, b, 2);
  EXPECT_GE(r.ssim, -1.0);
  EXPECT_LE(r.ssim, 1.0);
  EXPECT_GE(r.cc, -1.0);
  EXPECT_LE(r.cc, 1.0);
  EXPECT_GE(r.sam_deg, 0.0);
  EXPECT_LE(r.sam_deg, 180.0);
  EXPECT_GE(r.ergas, 0.0);
  EXPECT_NEAR(metric_ssim(a, b), metric_ssim(b, a), 1e-14);
  EXPECT_NE(metric_ergas(a, b, 2), metric_ergas(b, a, 2));
}

TEST(MetricsTest, PsnrDecreasesWithNoise) {
  oracle::Rng rng(104);
  Tensor gt = oracle::random_tensor({3, 8, 8}, rng, 0.3, 0.7);
  Tensor noise = oracle::random_tensor({3, 8, 8}, rng, -1, 1);
  double prev = 1e9;
  for (double amp : {0.01, 0.05, 0.2}) {
    Tensor pred = gt.detach();
    for (std::size_t i = 0; i < pred.numel(); ++i) pred.data()[i] += amp * noise.data()[i];
    const double p = metric_psnr(pred, gt);
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(MetricsTest, Errors) {
  Tensor a({2, 4, 4}, 0.5);
  EXPECT_THROW(metric_psnr(a, Tensor({2, 4, 5}, 0.5)), DimensionError);
  EXPECT_THROW(metric_ssim(Tensor({1, 2, 4, 4}), Tensor({1, 2, 4, 4})), DimensionError);
  Tensor out = a.detach();
  out.data()[3] = 1.01;
  EXPECT_THROW(metric_sam(out, a), DomainError);
  out.data()[3] = 1.0 + 5e-7;
  EXPECT_NO_THROW(metric_sam(out, a));
  EXPECT_NO_THROW(evaluate_all(Tensor({2, 4, 4}, 1.7), a, 2));  // clamped
}

TEST(MetricsTest, EvaluateAllConsistentWithIndividualOps) {
  oracle::Rng rng(105);
  Tensor gt = oracle::random_tensor({3, 8, 8}, rng, 0, 1);
  Tensor pred = oracle::random_tensor({3, 8, 8}, rng, 0, 1);
  MetricsReport r = evaluate_all(pred, gt, 4);
  EXPECT_EQ(r.psnr, metric_psnr(pred, gt));
  EXPECT_EQ(r.ssim, metric_ssim(pred, gt));
  EXPECT_EQ(r.sam_deg, metric_sam(pred, gt));
  EXPECT_EQ(r.cc, metric_cc(pred, gt));
  EXPECT_EQ(r.ergas, metric_ergas(pred, gt, 4));
  HsiCube pc = tensor_to_cube(pred), gc = tensor_to_cube(gt);
  MetricsReport rc = evaluate_all(pc, gc, 4);
  EXPECT_NEAR(rc.psnr, r.psnr, 1e-4);
}

TEST(MetricsTest, BicubicPipelineSmoke) {
  HsiCube hr = synth_scene(3, 32, 32, 6, 4);
  HsiCube lr = bicubic_resize(hr, 8, 8);
  HsiCube up = bicubic_resize(lr, 32, 32);
  MetricsReport r = evaluate_all(up, hr, 4);
  for (double v : {r.psnr, r.ssim, r.sam_deg, r.cc, r.ergas}) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_NE(v, 0.0);
  }
  EXPECT_LT(r.psnr, 100.0);
}

TEST(ReportTest, Formatting) {
  MetricsReport r{30.5, 0.9, 2.25, 0.99, 3.5, 4};
  EXPECT_EQ(format_report(r),
            "psnr=30.500000 ssim=0.900000 sam_deg=2.250000 cc=0.990000 ergas=3.500000 scale=4");
  EXPECT_EQ(report_tsv_header(), "psnr\tssim\tsam_deg\tcc\tergas\tscale");
  EXPECT_EQ(report_tsv_row(r), "30.500000\t0.900000\t2.250000\t0.990000\t3.500000\t4");
  MetricsReport s{20.5, 0.7, 1.75, 0.97, 2.5, 4};
  std::vector<MetricsReport> both{r, s};
  MetricsReport avg = average_reports(both);
  EXPECT_DOUBLE_EQ(avg.psnr, 25.5);
  EXPECT_DOUBLE_EQ(avg.sam_deg, 2.0);
  EXPECT_EQ(avg.scale, 4u);
}

}  // namespace
}  // namespace sdanet
