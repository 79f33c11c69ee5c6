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

#ifndef SDANET_METRICS_H_
#define SDANET_METRICS_H_

#include <cstdint>
#include <span>
#include <string>

#include "sdanet/tensor.h"

namespace sdanet {

struct HsiCube;

struct MetricsReport {
  double psnr = 0.0;     // dB, band-averaged, capped at kPsnrCap
  double ssim = 0.0;
  double sam_deg = 0.0;  // degrees
  double cc = 0.0;
  double ergas = 0.0;
  std::uint32_t scale = 1;
};

inline constexpr double kPsnrCap = 100.0;

// All metrics take single images of shape (B, H, W) with values in [0, 1]
// (1e-6 slack); anything else throws DomainError / DimensionError.
double metric_psnr(const Tensor& pred, const Tensor& gt);
// Gaussian window 11, sigma 1.5, K1 = 0.01, K2 = 0.03, range 1. The window is
// truncated at the image border and renormalized.
double metric_ssim(const Tensor& pred, const Tensor& gt);
double metric_sam(const Tensor& pred, const Tensor& gt);
double metric_cc(const Tensor& pred, const Tensor& gt);
double metric_ergas(const Tensor& pred, const Tensor& gt, std::uint32_t scale);

// Clamps `pred` to [0, 1] and computes all five metrics.
MetricsReport evaluate_all(const Tensor& pred, const Tensor& gt,
                           std::uint32_t scale);
MetricsReport evaluate_all(const HsiCube& pred, const HsiCube& gt,
                           std::uint32_t scale);

// Field-wise mean of several reports.
MetricsReport average_reports(std::span<const MetricsReport> reports);

// "psnr=<f> ssim=<f> sam_deg=<f> cc=<f> ergas=<f> scale=<n>"
std::string format_report(const MetricsReport& r);
std::string report_tsv_header();
std::string report_tsv_row(const MetricsReport& r);

}  // namespace sdanet

#endif  // SDANET_METRICS_H_
