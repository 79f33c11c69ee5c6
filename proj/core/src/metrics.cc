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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "sdanet/data.h"
#include "sdanet/errors.h"

namespace sdanet {

namespace {

constexpr double kRangeSlack = 1e-6;
constexpr double kMseFloor = 1e-10;
constexpr double kVarianceFloor = 1e-12;
constexpr double kMeanFloor = 1e-8;
constexpr double kNormFloor = 1e-8;
constexpr int kSsimRadius = 5;  // 11-tap window
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = 0.01 * 0.01;
constexpr double kSsimC2 = 0.03 * 0.03;

struct Dims {
  std::size_t bands, height, width;
  std::size_t plane() const { return height * width; }
};

Dims check_pair(const char* op, const Tensor& pred, const Tensor& gt) {
  if (pred.rank() != 3) {
    throw DimensionError(std::string(op) + ": expected (B, H, W), got " +
                         shape_string(pred.shape()));
  }
  if (pred.shape() != gt.shape()) {
    throw DimensionError(std::string(op) + ": prediction " +
                         shape_string(pred.shape()) + " vs ground truth " +
                         shape_string(gt.shape()));
  }
  for (const Tensor* t : {&pred, &gt}) {
    for (double v : t->data()) {
      if (!(v >= -kRangeSlack && v <= 1.0 + kRangeSlack)) {
        throw DomainError(std::string(op) + ": value " + std::to_string(v) +
                          " outside [0, 1]");
      }
    }
  }
  return Dims{pred.dim(0), pred.dim(1), pred.dim(2)};
}

std::vector<double> band_mse(const Tensor& pred, const Tensor& gt,
                             const Dims& d) {
  std::vector<double> mse(d.bands, 0.0);
  auto p = pred.data(), g = gt.data();
  for (std::size_t b = 0; b < d.bands; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.plane(); ++i) {
      const double e = p[b * d.plane() + i] - g[b * d.plane() + i];
      s += e * e;
    }
    mse[b] = s / static_cast<double>(d.plane());
  }
  return mse;
}

// Normalized Gaussian taps for every position of an axis of length n, with
// the window cut at the borders.
struct AxisWindow {
  std::vector<int> first;                // first in-range index per position
  std::vector<std::vector<double>> taps;
};

AxisWindow gaussian_window(std::size_t n) {
  std::array<double, 2 * kSsimRadius + 1> g{};
  for (int i = -kSsimRadius; i <= kSsimRadius; ++i)
    g[i + kSsimRadius] = std::exp(-(i * i) / (2.0 * kSsimSigma * kSsimSigma));
  AxisWindow w;
  const int len = static_cast<int>(n);
  for (int pos = 0; pos < len; ++pos) {
    const int lo = std::max(0, pos - kSsimRadius);
    const int hi = std::min(len - 1, pos + kSsimRadius);
    std::vector<double> taps;
    double total = 0.0;
    for (int j = lo; j <= hi; ++j) {
      taps.push_back(g[j - pos + kSsimRadius]);
      total += taps.back();
    }
    for (double& t : taps) t /= total;
    w.first.push_back(lo);
    w.taps.push_back(std::move(taps));
  }
  return w;
}

// Separable weighted local mean of one plane.
std::vector<double> local_mean(const std::vector<double>& plane,
                               std::size_t h, std::size_t w,
                               const AxisWindow& wy, const AxisWindow& wx) {
  std::vector<double> tmp(h * w, 0.0), out(h * w, 0.0);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      double s = 0.0;
      const auto& taps = wx.taps[x];
      for (std::size_t j = 0; j < taps.size(); ++j)
        s += taps[j] * plane[y * w + static_cast<std::size_t>(wx.first[x]) + j];
      tmp[y * w + x] = s;
    }
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      double s = 0.0;
      const auto& taps = wy.taps[y];
      for (std::size_t j = 0; j < taps.size(); ++j)
        s += taps[j] * tmp[(static_cast<std::size_t>(wy.first[y]) + j) * w + x];
      out[y * w + x] = s;
    }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

double metric_psnr(const Tensor& pred, const Tensor& gt) {
  const Dims d = check_pair("metric_psnr", pred, gt);
  double total = 0.0;
  for (double mse : band_mse(pred, gt, d))
    total += mse < kMseFloor ? kPsnrCap : 10.0 * std::log10(1.0 / mse);
  return total / static_cast<double>(d.bands);
}

double metric_ssim(const Tensor& pred, const Tensor& gt) {
  const Dims d = check_pair("metric_ssim", pred, gt);
  const AxisWindow wy = gaussian_window(d.height);
  const AxisWindow wx = gaussian_window(d.width);
  auto p = pred.data(), g = gt.data();
  double total = 0.0;
  const std::size_t n = d.plane();
  std::vector<double> a(n), b(n), aa(n), bb(n), ab(n);
  for (std::size_t band = 0; band < d.bands; ++band) {
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = p[band * n + i];
      b[i] = g[band * n + i];
      aa[i] = a[i] * a[i];
      bb[i] = b[i] * b[i];
      ab[i] = a[i] * b[i];
    }
    const auto mu_a = local_mean(a, d.height, d.width, wy, wx);
    const auto mu_b = local_mean(b, d.height, d.width, wy, wx);
    const auto m_aa = local_mean(aa, d.height, d.width, wy, wx);
    const auto m_bb = local_mean(bb, d.height, d.width, wy, wx);
    const auto m_ab = local_mean(ab, d.height, d.width, wy, wx);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double va = m_aa[i] - mu_a[i] * mu_a[i];
      const double vb = m_bb[i] - mu_b[i] * mu_b[i];
      const double cov = m_ab[i] - mu_a[i] * mu_b[i];
      s += ((2.0 * mu_a[i] * mu_b[i] + kSsimC1) * (2.0 * cov + kSsimC2)) /
           ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kSsimC1) *
            (va + vb + kSsimC2));
    }
    total += s / static_cast<double>(n);
  }
  return total / static_cast<double>(d.bands);
}

double metric_sam(const Tensor& pred, const Tensor& gt) {
  const Dims d = check_pair("metric_sam", pred, gt);
  auto p = pred.data(), g = gt.data();
  const std::size_t n = d.plane();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double pp = 0.0, gg = 0.0;
    for (std::size_t b = 0; b < d.bands; ++b) {
      const double pv = p[b * n + i], gv = g[b * n + i];
      pp += pv * pv;
      gg += gv * gv;
    }
    const double np = std::sqrt(pp), ng = std::sqrt(gg);
    if (np < kNormFloor || ng < kNormFloor) continue;
    double diff = 0.0, sum = 0.0;
    for (std::size_t b = 0; b < d.bands; ++b) {
      const double u = p[b * n + i] / np, v = g[b * n + i] / ng;
      diff += (u - v) * (u - v);
      sum += (u + v) * (u + v);
    }
    total += 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum)) * 180.0 / std::numbers::pi;
  }
  return total / static_cast<double>(n);
}

double metric_cc(const Tensor& pred, const Tensor& gt) {
  const Dims d = check_pair("metric_cc", pred, gt);
  auto p = pred.data(), g = gt.data();
  const std::size_t n = d.plane();
  const double count = static_cast<double>(n);
  double total = 0.0;
  for (std::size_t b = 0; b < d.bands; ++b) {
    double mp = 0.0, mg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mp += p[b * n + i];
      mg += g[b * n + i];
    }
    mp /= count;
    mg /= count;
    double cov = 0.0, vp = 0.0, vg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dp = p[b * n + i] - mp, dg = g[b * n + i] - mg;
      cov += dp * dg;
      vp += dp * dp;
      vg += dg * dg;
    }
    cov /= count;
    vp /= count;
    vg /= count;
    total += cov / std::sqrt(std::max(vp, kVarianceFloor) *
                             std::max(vg, kVarianceFloor));
  }
  return total / static_cast<double>(d.bands);
}

double metric_ergas(const Tensor& pred, const Tensor& gt, std::uint32_t scale) {
  const Dims d = check_pair("metric_ergas", pred, gt);
  if (scale == 0) throw ConfigError("metric_ergas: scale must be positive");
  const auto mse = band_mse(pred, gt, d);
  auto g = gt.data();
  const std::size_t n = d.plane();
  double acc = 0.0;
  for (std::size_t b = 0; b < d.bands; ++b) {
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += g[b * n + i];
    mu = std::max(mu / static_cast<double>(n), kMeanFloor);
    acc += mse[b] / (mu * mu);
  }
  return 100.0 / static_cast<double>(scale) *
         std::sqrt(acc / static_cast<double>(d.bands));
}

MetricsReport evaluate_all(const Tensor& pred, const Tensor& gt,
                           std::uint32_t scale) {
  Tensor clamped = pred.detach();
  for (double& v : clamped.data()) v = std::clamp(v, 0.0, 1.0);
  MetricsReport r;
  r.psnr = metric_psnr(clamped, gt);
  r.ssim = metric_ssim(clamped, gt);
  r.sam_deg = metric_sam(clamped, gt);
  r.cc = metric_cc(clamped, gt);
  r.ergas = metric_ergas(clamped, gt, scale);
  r.scale = scale;
  return r;
}

MetricsReport evaluate_all(const HsiCube& pred, const HsiCube& gt,
                           std::uint32_t scale) {
  return evaluate_all(cube_to_tensor(pred), cube_to_tensor(gt), scale);
}

MetricsReport average_reports(std::span<const MetricsReport> reports) {
  MetricsReport avg;
  if (reports.empty()) return avg;
  for (const MetricsReport& r : reports) {
    avg.psnr += r.psnr;
    avg.ssim += r.ssim;
    avg.sam_deg += r.sam_deg;
    avg.cc += r.cc;
    avg.ergas += r.ergas;
  }
  const double n = static_cast<double>(reports.size());
  avg.psnr /= n;
  avg.ssim /= n;
  avg.sam_deg /= n;
  avg.cc /= n;
  avg.ergas /= n;
  avg.scale = reports.front().scale;
  return avg;
}

std::string format_report(const MetricsReport& r) {
  return "psnr=" + fmt(r.psnr) + " ssim=" + fmt(r.ssim) +
         " sam_deg=" + fmt(r.sam_deg) + " cc=" + fmt(r.cc) +
         " ergas=" + fmt(r.ergas) + " scale=" + std::to_string(r.scale);
}

std::string report_tsv_header() { return "psnr\tssim\tsam_deg\tcc\tergas\tscale"; }

std::string report_tsv_row(const MetricsReport& r) {
  return fmt(r.psnr) + "\t" + fmt(r.ssim) + "\t" + fmt(r.sam_deg) + "\t" +
         fmt(r.cc) + "\t" + fmt(r.ergas) + "\t" + std::to_string(r.scale);
}

}  // namespace sdanet
