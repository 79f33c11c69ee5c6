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

#include "sdanet/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sdanet/errors.h"

namespace sdanet {

using detail::grad_sink;
using detail::make_result;

namespace {

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape " + shape_string(a.shape()) +
                         " does not match " + shape_string(b.shape()));
  }
}

void require_rank(const char* op, const char* what, const Tensor& t,
                  std::size_t rank) {
  if (t.rank() != rank) {
    throw DimensionError(std::string(op) + ": " + what + " must have rank " +
                         std::to_string(rank) + ", got shape " +
                         shape_string(t.shape()));
  }
}

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  std::vector<double> out(a.numel());
  auto da = a.data(), db = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = da[i] + db[i];
  return make_result("add", a.shape(), std::move(out), {a, b},
                     [a, b](std::span<const double> g) {
                       for (auto sink : {grad_sink(a), grad_sink(b)}) {
                         for (std::size_t i = 0; i < sink.size(); ++i)
                           sink[i] += g[i];
                       }
                     });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  std::vector<double> out(a.numel());
  auto da = a.data(), db = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = da[i] - db[i];
  return make_result("sub", a.shape(), std::move(out), {a, b},
                     [a, b](std::span<const double> g) {
                       auto ga = grad_sink(a);
                       for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
                       auto gb = grad_sink(b);
                       for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= g[i];
                     });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  std::vector<double> out(a.numel());
  auto da = a.data(), db = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = da[i] * db[i];
  return make_result("mul", a.shape(), std::move(out), {a, b},
                     [a, b](std::span<const double> g) {
                       auto da = a.data(), db = b.data();
                       auto ga = grad_sink(a);
                       for (std::size_t i = 0; i < ga.size(); ++i)
                         ga[i] += g[i] * db[i];
                       auto gb = grad_sink(b);
                       for (std::size_t i = 0; i < gb.size(); ++i)
                         gb[i] += g[i] * da[i];
                     });
}

Tensor scale(const Tensor& x, double factor) {
  std::vector<double> out(x.data().begin(), x.data().end());
  for (double& v : out) v *= factor;
  return make_result("scale", x.shape(), std::move(out), {x},
                     [x, factor](std::span<const double> g) {
                       auto gx = grad_sink(x);
                       for (std::size_t i = 0; i < gx.size(); ++i)
                         gx[i] += g[i] * factor;
                     });
}

Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  return make_result("sum", Shape{}, {s}, {x},
                     [x](std::span<const double> g) {
                       for (double& v : grad_sink(x)) v += g[0];
                     });
}

Tensor mean(const Tensor& x) {
  const double n = static_cast<double>(x.numel());
  double s = 0.0;
  for (double v : x.data()) s += v;
  return make_result("mean", Shape{}, {s / n}, {x},
                     [x, n](std::span<const double> g) {
                       const double share = g[0] / n;
                       for (double& v : grad_sink(x)) v += share;
                     });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw DimensionError("reshape: cannot view " + shape_string(x.shape()) +
                         " as " + shape_string(shape));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  return make_result("reshape", std::move(shape), std::move(out), {x},
                     [x](std::span<const double> g) {
                       auto gx = grad_sink(x);
                       for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i];
                     });
}

Tensor transpose_last2(const Tensor& x) {
  if (x.rank() != 2 && x.rank() != 3) {
    throw DimensionError("transpose_last2: rank must be 2 or 3, got shape " +
                         shape_string(x.shape()));
  }
  const std::size_t batch = x.rank() == 3 ? x.dim(0) : 1;
  const std::size_t rows = x.dim(x.rank() - 2);
  const std::size_t cols = x.dim(x.rank() - 1);
  Shape shape = x.shape();
  std::swap(shape[shape.size() - 1], shape[shape.size() - 2]);
  std::vector<double> out(x.numel());
  auto src = x.data();
  for (std::size_t b = 0; b < batch; ++b) {
    const std::size_t off = b * rows * cols;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        out[off + j * rows + i] = src[off + i * cols + j];
  }
  return make_result("transpose_last2", std::move(shape), std::move(out), {x},
                     [x, batch, rows, cols](std::span<const double> g) {
                       auto gx = grad_sink(x);
                       for (std::size_t b = 0; b < batch; ++b) {
                         const std::size_t off = b * rows * cols;
                         for (std::size_t i = 0; i < rows; ++i)
                           for (std::size_t j = 0; j < cols; ++j)
                             gx[off + i * cols + j] += g[off + j * rows + i];
                       }
                     });
}

Tensor concat_channels(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ContractError("concat_channels: no inputs");
  const Tensor& first = parts.front();
  if (first.rank() < 2) {
    throw DimensionError("concat_channels: rank must be >= 2, got shape " +
                         shape_string(first.shape()));
  }
  const std::size_t outer = first.dim(0);
  const std::size_t inner = first.numel() / (outer * first.dim(1));
  std::size_t channels = 0;
  for (const Tensor& p : parts) {
    bool ok = p.rank() == first.rank() && p.dim(0) == outer;
    for (std::size_t a = 2; ok && a < p.rank(); ++a)
      ok = p.dim(a) == first.dim(a);
    if (!ok) {
      throw DimensionError("concat_channels: shape " + shape_string(p.shape()) +
                           " incompatible with " + shape_string(first.shape()) +
                           " outside axis 1");
    }
    channels += p.dim(1);
  }
  Shape shape = first.shape();
  shape[1] = channels;
  std::vector<double> out(shape_numel(shape));
  std::vector<std::size_t> offsets;
  std::size_t c0 = 0;
  for (const Tensor& p : parts) {
    offsets.push_back(c0);
    const std::size_t pc = p.dim(1);
    auto src = p.data();
    for (std::size_t n = 0; n < outer; ++n)
      std::copy_n(src.begin() + n * pc * inner, pc * inner,
                  out.begin() + (n * channels + c0) * inner);
    c0 += pc;
  }
  return make_result(
      "concat_channels", std::move(shape), std::move(out), parts,
      [parts, offsets, outer, inner, channels](std::span<const double> g) {
        for (std::size_t k = 0; k < parts.size(); ++k) {
          auto gp = grad_sink(parts[k]);
          if (gp.empty()) continue;
          const std::size_t pc = parts[k].dim(1);
          for (std::size_t n = 0; n < outer; ++n) {
            const double* src = g.data() + (n * channels + offsets[k]) * inner;
            double* dst = gp.data() + n * pc * inner;
            for (std::size_t i = 0; i < pc * inner; ++i) dst[i] += src[i];
          }
        }
      });
}

Tensor slice_channels(const Tensor& x, std::size_t begin, std::size_t end) {
  if (x.rank() < 2) {
    throw DimensionError("slice_channels: rank must be >= 2, got shape " +
                         shape_string(x.shape()));
  }
  const std::size_t channels = x.dim(1);
  if (begin >= end || end > channels) {
    throw DimensionError("slice_channels: range [" + std::to_string(begin) +
                         ", " + std::to_string(end) + ") invalid for axis 1 of " +
                         shape_string(x.shape()));
  }
  const std::size_t outer = x.dim(0);
  const std::size_t inner = x.numel() / (outer * channels);
  const std::size_t width = end - begin;
  Shape shape = x.shape();
  shape[1] = width;
  std::vector<double> out(shape_numel(shape));
  auto src = x.data();
  for (std::size_t n = 0; n < outer; ++n)
    std::copy_n(src.begin() + (n * channels + begin) * inner, width * inner,
                out.begin() + n * width * inner);
  return make_result(
      "slice_channels", std::move(shape), std::move(out), {x},
      [x, begin, outer, inner, width, channels](std::span<const double> g) {
        auto gx = grad_sink(x);
        for (std::size_t n = 0; n < outer; ++n) {
          double* dst = gx.data() + (n * channels + begin) * inner;
          const double* s = g.data() + n * width * inner;
          for (std::size_t i = 0; i < width * inner; ++i) dst[i] += s[i];
        }
      });
}

Tensor mul_per_sample(const Tensor& x, const Tensor& factors) {
  if (x.rank() < 1 || factors.numel() != x.dim(0)) {
    throw DimensionError("mul_per_sample: axis 0 of " + shape_string(x.shape()) +
                         " does not match " + std::to_string(factors.numel()) +
                         " factors");
  }
  const std::size_t batch = x.dim(0);
  const std::size_t inner = x.numel() / batch;
  std::vector<double> out(x.numel());
  auto dx = x.data(), df = factors.data();
  for (std::size_t n = 0; n < batch; ++n)
    for (std::size_t i = 0; i < inner; ++i)
      out[n * inner + i] = dx[n * inner + i] * df[n];
  return make_result("mul_per_sample", x.shape(), std::move(out), {x, factors},
                     [x, factors, batch, inner](std::span<const double> g) {
                       auto dx = x.data(), df = factors.data();
                       auto gx = grad_sink(x);
                       if (!gx.empty()) {
                         for (std::size_t n = 0; n < batch; ++n)
                           for (std::size_t i = 0; i < inner; ++i)
                             gx[n * inner + i] += g[n * inner + i] * df[n];
                       }
                       auto gf = grad_sink(factors);
                       if (!gf.empty()) {
                         for (std::size_t n = 0; n < batch; ++n) {
                           double s = 0.0;
                           for (std::size_t i = 0; i < inner; ++i)
                             s += g[n * inner + i] * dx[n * inner + i];
                           gf[n] += s;
                         }
                       }
                     });
}

Tensor unit_gate(const Tensor& g) {
  std::vector<double> out(g.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = g.data()[i] / g.data()[i];
  return make_result("unit_gate", g.shape(), std::move(out), {g},
                     [g](std::span<const double> grad) {
                       auto dg = g.data();
                       auto sink = grad_sink(g);
                       for (std::size_t i = 0; i < sink.size(); ++i)
                         sink[i] += grad[i] / dg[i];
                     });
}

Tensor conv2d(const Tensor& input, const Tensor& weight,
              const std::optional<Tensor>& bias, std::size_t groups,
              std::size_t padding) {
  require_rank("conv2d", "input", input, 4);
  require_rank("conv2d", "weight", weight, 4);
  const std::size_t batch = input.dim(0), cin = input.dim(1);
  const std::size_t height = input.dim(2), width = input.dim(3);
  const std::size_t cout = weight.dim(0);
  const std::size_t kh = weight.dim(2), kw = weight.dim(3);
  if (groups == 0 || cin % groups != 0) {
    throw ConfigError("conv2d: groups=" + std::to_string(groups) +
                      " does not divide input channels " + std::to_string(cin));
  }
  if (cout % groups != 0) {
    throw ConfigError("conv2d: groups=" + std::to_string(groups) +
                      " does not divide output channels " +
                      std::to_string(cout));
  }
  const std::size_t cin_g = cin / groups, cout_g = cout / groups;
  if (weight.dim(1) != cin_g) {
    throw DimensionError("conv2d: weight axis 1 (in_channels/groups) is " +
                         std::to_string(weight.dim(1)) + ", expected " +
                         std::to_string(cin_g));
  }
  if (bias && (bias->rank() != 1 || bias->dim(0) != cout)) {
    throw DimensionError("conv2d: bias axis 0 must equal out_channels " +
                         std::to_string(cout) + ", got shape " +
                         shape_string(bias->shape()));
  }
  if (height + 2 * padding < kh) {
    throw DimensionError("conv2d: axis 2 (height) " + std::to_string(height) +
                         " too small for kernel " + std::to_string(kh));
  }
  if (width + 2 * padding < kw) {
    throw DimensionError("conv2d: axis 3 (width) " + std::to_string(width) +
                         " too small for kernel " + std::to_string(kw));
  }
  const std::size_t oh = height + 2 * padding - kh + 1;
  const std::size_t ow = width + 2 * padding - kw + 1;
  const auto pad = static_cast<std::ptrdiff_t>(padding);
  const auto H = static_cast<std::ptrdiff_t>(height);
  const auto W = static_cast<std::ptrdiff_t>(width);
  const auto OH = static_cast<std::ptrdiff_t>(oh);
  const auto OW = static_cast<std::ptrdiff_t>(ow);

  // Visits every (output row/col range, input offset) pair of one kernel tap.
  // Ranges keep ih = oh + ky - pad inside [0, H).
  auto tap_range = [](std::ptrdiff_t k, std::ptrdiff_t pad, std::ptrdiff_t in,
                      std::ptrdiff_t out) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, pad - k);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(out, in + pad - k);
    return std::pair{lo, hi};
  };

  std::vector<double> out(batch * cout * oh * ow, 0.0);
  auto in = input.data();
  auto wt = weight.data();
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t oc = 0; oc < cout; ++oc) {
      double* op = out.data() + (n * cout + oc) * oh * ow;
      if (bias) std::fill_n(op, oh * ow, bias->data()[oc]);
      const std::size_t grp = oc / cout_g;
      for (std::size_t icg = 0; icg < cin_g; ++icg) {
        const double* ip =
            in.data() + (n * cin + grp * cin_g + icg) * height * width;
        const double* wp = wt.data() + (oc * cin_g + icg) * kh * kw;
        for (std::ptrdiff_t ky = 0; ky < static_cast<std::ptrdiff_t>(kh); ++ky) {
          auto [y0, y1] = tap_range(ky, pad, H, OH);
          for (std::ptrdiff_t kx = 0; kx < static_cast<std::ptrdiff_t>(kw);
               ++kx) {
            auto [x0, x1] = tap_range(kx, pad, W, OW);
            const double w = wp[ky * static_cast<std::ptrdiff_t>(kw) + kx];
            for (std::ptrdiff_t y = y0; y < y1; ++y) {
              double* orow = op + y * OW;
              const double* irow = ip + (y + ky - pad) * W + (kx - pad);
              for (std::ptrdiff_t x = x0; x < x1; ++x) orow[x] += w * irow[x];
            }
          }
        }
      }
    }
  }

  std::vector<Tensor> inputs{input, weight};
  if (bias) inputs.push_back(*bias);
  return make_result(
      "conv2d", Shape{batch, cout, oh, ow}, std::move(out), inputs,
      [=](std::span<const double> g) {
        auto gin = grad_sink(input);
        auto gw = grad_sink(weight);
        auto in = input.data();
        auto wt = weight.data();
        for (std::size_t n = 0; n < batch; ++n) {
          for (std::size_t oc = 0; oc < cout; ++oc) {
            const double* gp = g.data() + (n * cout + oc) * oh * ow;
            const std::size_t grp = oc / cout_g;
            for (std::size_t icg = 0; icg < cin_g; ++icg) {
              const std::size_t plane = (n * cin + grp * cin_g + icg) * height * width;
              const double* ip = in.data() + plane;
              const std::size_t woff = (oc * cin_g + icg) * kh * kw;
              for (std::ptrdiff_t ky = 0; ky < static_cast<std::ptrdiff_t>(kh);
                   ++ky) {
                auto [y0, y1] = tap_range(ky, pad, H, OH);
                for (std::ptrdiff_t kx = 0;
                     kx < static_cast<std::ptrdiff_t>(kw); ++kx) {
                  auto [x0, x1] = tap_range(kx, pad, W, OW);
                  const std::size_t widx =
                      woff + static_cast<std::size_t>(
                                 ky * static_cast<std::ptrdiff_t>(kw) + kx);
                  const double w = wt[widx];
                  double acc = 0.0;
                  for (std::ptrdiff_t y = y0; y < y1; ++y) {
                    const double* grow = gp + y * OW;
                    const std::ptrdiff_t ioff = (y + ky - pad) * W + (kx - pad);
                    if (!gin.empty()) {
                      double* girow = gin.data() + plane + ioff;
                      for (std::ptrdiff_t x = x0; x < x1; ++x)
                        girow[x] += w * grow[x];
                    }
                    if (!gw.empty()) {
                      const double* irow = ip + ioff;
                      for (std::ptrdiff_t x = x0; x < x1; ++x)
                        acc += grow[x] * irow[x];
                    }
                  }
                  if (!gw.empty()) gw[widx] += acc;
                }
              }
            }
          }
        }
        if (bias) {
          auto gb = grad_sink(*bias);
          if (!gb.empty()) {
            for (std::size_t n = 0; n < batch; ++n)
              for (std::size_t oc = 0; oc < cout; ++oc) {
                const double* gp = g.data() + (n * cout + oc) * oh * ow;
                double s = 0.0;
                for (std::size_t i = 0; i < oh * ow; ++i) s += gp[i];
                gb[oc] += s;
              }
          }
        }
      });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != b.rank() || (a.rank() != 2 && a.rank() != 3)) {
    throw DimensionError("matmul: operands must both be rank 2 or rank 3, got " +
                         shape_string(a.shape()) + " and " +
                         shape_string(b.shape()));
  }
  const bool batched = a.rank() == 3;
  const std::size_t batch = batched ? a.dim(0) : 1;
  if (batched && b.dim(0) != batch) {
    throw DimensionError("matmul: batch axis 0 differs (" +
                         std::to_string(a.dim(0)) + " vs " +
                         std::to_string(b.dim(0)) + ")");
  }
  const std::size_t m = a.dim(a.rank() - 2), k = a.dim(a.rank() - 1);
  const std::size_t n = b.dim(b.rank() - 1);
  if (b.dim(b.rank() - 2) != k) {
    throw DimensionError("matmul: inner axis mismatch, a has " +
                         std::to_string(k) + " columns but b has " +
                         std::to_string(b.dim(b.rank() - 2)) + " rows");
  }
  std::vector<double> out(batch * m * n, 0.0);
  auto da = a.data(), db = b.data();
  for (std::size_t s = 0; s < batch; ++s) {
    const double* pa = da.data() + s * m * k;
    const double* pb = db.data() + s * k * n;
    double* po = out.data() + s * m * n;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t p = 0; p < k; ++p) {
        const double av = pa[i * k + p];
        for (std::size_t j = 0; j < n; ++j) po[i * n + j] += av * pb[p * n + j];
      }
  }
  Shape shape = batched ? Shape{batch, m, n} : Shape{m, n};
  return make_result(
      "matmul", std::move(shape), std::move(out), {a, b},
      [a, b, batch, m, k, n](std::span<const double> g) {
        auto da = a.data(), db = b.data();
        auto ga = grad_sink(a);
        auto gb = grad_sink(b);
        for (std::size_t s = 0; s < batch; ++s) {
          const double* pa = da.data() + s * m * k;
          const double* pb = db.data() + s * k * n;
          const double* pg = g.data() + s * m * n;
          if (!ga.empty()) {
            double* qa = ga.data() + s * m * k;
            for (std::size_t i = 0; i < m; ++i)
              for (std::size_t p = 0; p < k; ++p) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                  acc += pg[i * n + j] * pb[p * n + j];
                qa[i * k + p] += acc;
              }
          }
          if (!gb.empty()) {
            double* qb = gb.data() + s * k * n;
            for (std::size_t i = 0; i < m; ++i)
              for (std::size_t p = 0; p < k; ++p) {
                const double av = pa[i * k + p];
                for (std::size_t j = 0; j < n; ++j)
                  qb[p * n + j] += av * pg[i * n + j];
              }
          }
        }
      });
}

Tensor softmax_rows(const Tensor& logits, std::span<const std::uint8_t> mask) {
  if (logits.rank() < 1) {
    throw DimensionError("softmax_rows: logits must have rank >= 1");
  }
  if (!mask.empty() && mask.size() != logits.numel()) {
    throw DimensionError("softmax_rows: mask has " +
                         std::to_string(mask.size()) + " entries for logits " +
                         shape_string(logits.shape()));
  }
  const std::size_t cols = logits.dim(logits.rank() - 1);
  const std::size_t rows = cols == 0 ? 0 : logits.numel() / cols;
  std::vector<double> out(logits.numel(), 0.0);
  auto x = logits.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t off = r * cols;
    auto keep = [&](std::size_t j) { return mask.empty() || mask[off + j]; };
    double mx = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t j = 0; j < cols; ++j)
      if (keep(j)) {
        mx = std::max(mx, x[off + j]);
        any = true;
      }
    if (!any) {
      throw DegenerateRowError("softmax_rows: row " + std::to_string(r) +
                               " is fully masked");
    }
    double z = 0.0;
    for (std::size_t j = 0; j < cols; ++j)
      if (keep(j)) {
        out[off + j] = std::exp(x[off + j] - mx);
        z += out[off + j];
      }
    for (std::size_t j = 0; j < cols; ++j) out[off + j] /= z;
  }
  Tensor result = make_result("softmax_rows", logits.shape(), out, {logits},
                              [logits, out, rows, cols](std::span<const double> g) {
                                auto gx = grad_sink(logits);
                                for (std::size_t r = 0; r < rows; ++r) {
                                  const std::size_t off = r * cols;
                                  double dot = 0.0;
                                  for (std::size_t j = 0; j < cols; ++j)
                                    dot += out[off + j] * g[off + j];
                                  for (std::size_t j = 0; j < cols; ++j)
                                    gx[off + j] += out[off + j] * (g[off + j] - dot);
                                }
                              });
  return result;
}

std::vector<std::size_t> topk_indices(std::span<const double> row,
                                      std::size_t k) {
  if (k < 1 || k > row.size()) {
    throw ConfigError("topk: k=" + std::to_string(k) + " outside [1, " +
                      std::to_string(row.size()) + "]");
  }
  std::vector<std::size_t> idx(row.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k),
                    idx.end(), [&](std::size_t a, std::size_t b) {
                      if (row[a] != row[b]) return row[a] > row[b];
                      return a < b;
                    });
  idx.resize(k);
  return idx;
}

std::vector<std::vector<std::size_t>> topk_row_indices(const Tensor& values,
                                                       std::size_t k) {
  if (values.rank() < 1) {
    throw DimensionError("topk_row_indices: values must have rank >= 1");
  }
  const std::size_t cols = values.dim(values.rank() - 1);
  const std::size_t rows = cols == 0 ? 0 : values.numel() / cols;
  std::vector<std::vector<std::size_t>> result;
  result.reserve(rows);
  auto d = values.data();
  for (std::size_t r = 0; r < rows; ++r)
    result.push_back(topk_indices(d.subspan(r * cols, cols), k));
  return result;
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps) {
  require_rank("layer_norm", "input", x, 4);
  const std::size_t batch = x.dim(0), channels = x.dim(1);
  const std::size_t plane = x.dim(2) * x.dim(3);
  if (gamma.numel() != channels || beta.numel() != channels) {
    throw DimensionError("layer_norm: gamma/beta length must equal axis 1 (" +
                         std::to_string(channels) + ")");
  }
  std::vector<double> out(x.numel());
  std::vector<double> xhat(x.numel());
  std::vector<double> inv_std(batch * plane);
  auto dx = x.data(), dg = gamma.data(), db = beta.data();
  const double c = static_cast<double>(channels);
  for (std::size_t n = 0; n < batch; ++n)
    for (std::size_t p = 0; p < plane; ++p) {
      const std::size_t base = n * channels * plane + p;
      double mu = 0.0;
      for (std::size_t ch = 0; ch < channels; ++ch) mu += dx[base + ch * plane];
      mu /= c;
      double var = 0.0;
      for (std::size_t ch = 0; ch < channels; ++ch) {
        const double d = dx[base + ch * plane] - mu;
        var += d * d;
      }
      var /= c;
      const double is = 1.0 / std::sqrt(var + eps);
      inv_std[n * plane + p] = is;
      for (std::size_t ch = 0; ch < channels; ++ch) {
        const std::size_t i = base + ch * plane;
        xhat[i] = (dx[i] - mu) * is;
        out[i] = dg[ch] * xhat[i] + db[ch];
      }
    }
  return make_result(
      "layer_norm", x.shape(), std::move(out), {x, gamma, beta},
      [x, gamma, beta, xhat = std::move(xhat), inv_std = std::move(inv_std),
       batch, channels, plane](std::span<const double> g) {
        auto gx = grad_sink(x);
        auto gg = grad_sink(gamma);
        auto gb = grad_sink(beta);
        auto dg = gamma.data();
        const double c = static_cast<double>(channels);
        for (std::size_t n = 0; n < batch; ++n)
          for (std::size_t p = 0; p < plane; ++p) {
            const std::size_t base = n * channels * plane + p;
            double s1 = 0.0, s2 = 0.0;
            for (std::size_t ch = 0; ch < channels; ++ch) {
              const std::size_t i = base + ch * plane;
              const double dxh = g[i] * dg[ch];
              s1 += dxh;
              s2 += dxh * xhat[i];
              if (!gg.empty()) gg[ch] += g[i] * xhat[i];
              if (!gb.empty()) gb[ch] += g[i];
            }
            if (gx.empty()) continue;
            const double is = inv_std[n * plane + p];
            for (std::size_t ch = 0; ch < channels; ++ch) {
              const std::size_t i = base + ch * plane;
              const double dxh = g[i] * dg[ch];
              gx[i] += is * (dxh - s1 / c - xhat[i] * s2 / c);
            }
          }
      });
}

Tensor activation(const Tensor& x, Activation kind) {
  std::vector<double> out(x.numel());
  auto dx = x.data();
  if (kind == Activation::kSigmoid) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double v = dx[i];
      // Evaluate through exp(-|v|) so large magnitudes never overflow.
      const double e = std::exp(-std::abs(v));
      out[i] = v >= 0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
    }
    return make_result("sigmoid", x.shape(), out, {x},
                       [x, out](std::span<const double> g) {
                         auto gx = grad_sink(x);
                         for (std::size_t i = 0; i < gx.size(); ++i)
                           gx[i] += g[i] * out[i] * (1.0 - out[i]);
                       });
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = dx[i];
    out[i] = 0.5 * v * (1.0 + std::erf(v * kInvSqrt2));
  }
  return make_result("gelu", x.shape(), std::move(out), {x},
                     [x](std::span<const double> g) {
                       auto gx = grad_sink(x);
                       auto dx = x.data();
                       for (std::size_t i = 0; i < gx.size(); ++i) {
                         const double v = dx[i];
                         const double cdf = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
                         const double pdf = kInvSqrt2Pi * std::exp(-0.5 * v * v);
                         gx[i] += g[i] * (cdf + v * pdf);
                       }
                     });
}

Tensor global_avg_pool(const Tensor& x, std::span<const std::size_t> axes) {
  std::vector<bool> reduced(x.rank(), false);
  for (std::size_t a : axes) {
    if (a >= x.rank()) {
      throw DimensionError("global_avg_pool: axis " + std::to_string(a) +
                           " out of range for shape " + shape_string(x.shape()));
    }
    reduced[a] = true;
  }
  Shape out_shape;
  std::size_t count = 1;
  for (std::size_t a = 0; a < x.rank(); ++a) {
    if (reduced[a]) {
      count *= x.dim(a);
    } else {
      out_shape.push_back(x.dim(a));
    }
  }
  // map[i] = flat output index of input element i
  std::vector<std::size_t> map(x.numel());
  {
    std::vector<std::size_t> idx(x.rank(), 0);
    for (std::size_t i = 0; i < map.size(); ++i) {
      std::size_t o = 0;
      for (std::size_t a = 0; a < x.rank(); ++a)
        if (!reduced[a]) o = o * x.dim(a) + idx[a];
      map[i] = o;
      for (std::size_t a = x.rank(); a-- > 0;) {
        if (++idx[a] < x.dim(a)) break;
        idx[a] = 0;
      }
    }
  }
  std::vector<double> out(shape_numel(out_shape), 0.0);
  auto dx = x.data();
  for (std::size_t i = 0; i < map.size(); ++i) out[map[i]] += dx[i];
  const double inv = 1.0 / static_cast<double>(count);
  for (double& v : out) v *= inv;
  return make_result("global_avg_pool", std::move(out_shape), std::move(out),
                     {x}, [x, map = std::move(map), inv](std::span<const double> g) {
                       auto gx = grad_sink(x);
                       for (std::size_t i = 0; i < gx.size(); ++i)
                         gx[i] += g[map[i]] * inv;
                     });
}

namespace {

// Flat index pairs (shuffled output position <- input position).
std::vector<std::size_t> shuffle_map(std::size_t batch, std::size_t out_c,
                                     std::size_t h, std::size_t w,
                                     std::size_t r) {
  std::vector<std::size_t> map(batch * out_c * r * r * h * w);
  const std::size_t oh = h * r, ow = w * r;
  for (std::size_t n = 0; n < batch; ++n)
    for (std::size_t c = 0; c < out_c; ++c)
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
          const std::size_t ic = c * r * r + i * r + j;
          for (std::size_t y = 0; y < h; ++y)
            for (std::size_t x = 0; x < w; ++x) {
              const std::size_t src = ((n * out_c * r * r + ic) * h + y) * w + x;
              const std::size_t dst =
                  ((n * out_c + c) * oh + y * r + i) * ow + x * r + j;
              map[dst] = src;
            }
        }
  return map;
}

}  // namespace

Tensor pixel_shuffle(const Tensor& x, std::size_t r) {
  require_rank("pixel_shuffle", "input", x, 4);
  if (r == 0 || x.dim(1) % (r * r) != 0) {
    throw ConfigError("pixel_shuffle: channels " + std::to_string(x.dim(1)) +
                      " not divisible by r^2 = " + std::to_string(r * r));
  }
  const std::size_t batch = x.dim(0), oc = x.dim(1) / (r * r);
  const std::size_t h = x.dim(2), w = x.dim(3);
  auto map = shuffle_map(batch, oc, h, w, r);
  std::vector<double> out(x.numel());
  auto dx = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = dx[map[i]];
  return make_result("pixel_shuffle", Shape{batch, oc, h * r, w * r},
                     std::move(out), {x},
                     [x, map = std::move(map)](std::span<const double> g) {
                       auto gx = grad_sink(x);
                       for (std::size_t i = 0; i < map.size(); ++i)
                         gx[map[i]] += g[i];
                     });
}

Tensor pixel_unshuffle(const Tensor& x, std::size_t r) {
  require_rank("pixel_unshuffle", "input", x, 4);
  if (r == 0 || x.dim(2) % r != 0 || x.dim(3) % r != 0) {
    throw ConfigError("pixel_unshuffle: spatial extents " +
                      shape_string(x.shape()) + " not divisible by r = " +
                      std::to_string(r));
  }
  const std::size_t batch = x.dim(0), c = x.dim(1);
  const std::size_t h = x.dim(2) / r, w = x.dim(3) / r;
  auto map = shuffle_map(batch, c, h, w, r);
  std::vector<double> out(x.numel());
  auto dx = x.data();
  for (std::size_t i = 0; i < map.size(); ++i) out[map[i]] = dx[i];
  return make_result("pixel_unshuffle", Shape{batch, c * r * r, h, w},
                     std::move(out), {x},
                     [x, map = std::move(map)](std::span<const double> g) {
                       auto gx = grad_sink(x);
                       for (std::size_t i = 0; i < map.size(); ++i)
                         gx[i] += g[map[i]];
                     });
}

}  // namespace sdanet
