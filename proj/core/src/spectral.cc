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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sdanet/errors.h"
#include "sdanet/fft.h"
#include "sdanet/ops.h"

namespace sdanet {

using detail::grad_sink;
using detail::make_result;
using fft::Complex;

namespace {

// x: H*W real plane -> re/im: H*Wf half spectrum (unnormalized).
void rfft2_plane(const double* x, std::size_t h, std::size_t w, double* re,
                 double* im) {
  const std::size_t wf = w / 2 + 1;
  const fft::Plan& row_plan = fft::plan_for(w);
  const fft::Plan& col_plan = fft::plan_for(h);
  std::vector<Complex> half(h * wf);
  std::vector<Complex> buf(std::max(w, h));
  for (std::size_t y = 0; y < h; ++y) {
    std::span<Complex> row(buf.data(), w);
    for (std::size_t x0 = 0; x0 < w; ++x0) row[x0] = Complex(x[y * w + x0], 0.0);
    row_plan.forward(row);
    std::copy_n(row.begin(), wf, half.begin() + static_cast<std::ptrdiff_t>(y * wf));
  }
  for (std::size_t l = 0; l < wf; ++l) {
    std::span<Complex> col(buf.data(), h);
    for (std::size_t k = 0; k < h; ++k) col[k] = half[k * wf + l];
    col_plan.forward(col);
    for (std::size_t k = 0; k < h; ++k) {
      re[k * wf + l] = col[k].real();
      im[k * wf + l] = col[k].imag();
    }
  }
}

// Column inverse followed by a row inverse of the Hermitian-completed rows.
// Writes the unnormalized complex result into `out` (H*W).
void irfft2_plane_complex(const double* re, const double* im, std::size_t h,
                          std::size_t w, std::vector<Complex>& out) {
  const std::size_t wf = w / 2 + 1;
  const fft::Plan& row_plan = fft::plan_for(w);
  const fft::Plan& col_plan = fft::plan_for(h);
  std::vector<Complex> half(h * wf);
  std::vector<Complex> col(h);
  for (std::size_t l = 0; l < wf; ++l) {
    for (std::size_t k = 0; k < h; ++k)
      col[k] = Complex(re[k * wf + l], im[k * wf + l]);
    col_plan.inverse(col);
    for (std::size_t y = 0; y < h; ++y) half[y * wf + l] = col[y];
  }
  out.assign(h * w, Complex{});
  for (std::size_t y = 0; y < h; ++y) {
    std::span<Complex> row(out.data() + y * w, w);
    for (std::size_t l = 0; l < wf; ++l) row[l] = half[y * wf + l];
    for (std::size_t l = wf; l < w; ++l) row[l] = std::conj(half[y * wf + (w - l)]);
    row_plan.inverse(row);
  }
}

// Bins equal to their own conjugate partner; the imaginary part there does
// not reach a real output.
bool self_conjugate(std::size_t k, std::size_t l, std::size_t h, std::size_t w) {
  const bool row = k == 0 || (h % 2 == 0 && k == h / 2);
  const bool col = l == 0 || (w % 2 == 0 && l == w / 2);
  return row && col;
}

// Adjoint of rfft2_plane: dx[h,w] += Re(sum_{k,l<Wf} G[k,l] e^{+i theta}).
void rfft2_plane_adjoint(const double* gre, const double* gim, std::size_t h,
                         std::size_t w, double* dx) {
  const std::size_t wf = w / 2 + 1;
  const fft::Plan& row_plan = fft::plan_for(w);
  const fft::Plan& col_plan = fft::plan_for(h);
  std::vector<Complex> half(h * wf);
  std::vector<Complex> col(h);
  for (std::size_t l = 0; l < wf; ++l) {
    for (std::size_t k = 0; k < h; ++k)
      col[k] = Complex(gre ? gre[k * wf + l] : 0.0, gim ? gim[k * wf + l] : 0.0);
    col_plan.inverse(col);
    for (std::size_t y = 0; y < h; ++y) half[y * wf + l] = col[y];
  }
  std::vector<Complex> row(w);
  for (std::size_t y = 0; y < h; ++y) {
    std::fill(row.begin(), row.end(), Complex{});
    for (std::size_t l = 0; l < wf; ++l) row[l] = half[y * wf + l];
    row_plan.inverse(row);
    for (std::size_t x = 0; x < w; ++x) dx[y * w + x] += row[x].real();
  }
}

void require_grid(const char* op, const ComplexGrid& g) {
  if (g.re.rank() != 4 || g.re.shape() != g.im.shape()) {
    throw DimensionError(std::string(op) +
                         ": real and imaginary planes must share a rank-4 shape");
  }
  if (g.re.dim(3) != g.width / 2 + 1) {
    throw DimensionError(std::string(op) + ": axis 3 has " +
                         std::to_string(g.re.dim(3)) +
                         " bins, inconsistent with original width " +
                         std::to_string(g.width));
  }
}

}  // namespace

ComplexGrid fft2(const Tensor& x) {
  if (x.rank() != 4) {
    throw DimensionError("fft2: input must be rank 4 (N, C, H, W), got " +
                         shape_string(x.shape()));
  }
  const std::size_t planes = x.dim(0) * x.dim(1);
  const std::size_t h = x.dim(2), w = x.dim(3), wf = w / 2 + 1;
  if (h == 0 || w == 0) throw DimensionError("fft2: empty spatial axes");
  std::vector<double> re(planes * h * wf), im(planes * h * wf);
  auto src = x.data();
  for (std::size_t p = 0; p < planes; ++p)
    rfft2_plane(src.data() + p * h * w, h, w, re.data() + p * h * wf,
                im.data() + p * h * wf);
  for (std::size_t p = 0; p < planes; ++p)
    for (std::size_t k = 0; k < h; ++k)
      for (std::size_t l = 0; l < wf; ++l)
        if (self_conjugate(k, l, h, w)) im[p * h * wf + k * wf + l] = 0.0;
  const Shape shape{x.dim(0), x.dim(1), h, wf};
  auto adjoint = [x, planes, h, w, wf](std::span<const double> g, bool imag) {
    auto gx = grad_sink(x);
    for (std::size_t p = 0; p < planes; ++p) {
      const double* gp = g.data() + p * h * wf;
      rfft2_plane_adjoint(imag ? nullptr : gp, imag ? gp : nullptr, h, w,
                          gx.data() + p * h * w);
    }
  };
  ComplexGrid out;
  out.width = w;
  out.re = make_result("fft2.re", shape, std::move(re), {x},
                       [adjoint](std::span<const double> g) { adjoint(g, false); });
  out.im = make_result("fft2.im", shape, std::move(im), {x},
                       [adjoint](std::span<const double> g) { adjoint(g, true); });
  return out;
}

Tensor ifft2(const ComplexGrid& grid) {
  require_grid("ifft2", grid);
  const std::size_t n = grid.re.dim(0), c = grid.re.dim(1);
  const std::size_t h = grid.re.dim(2), w = grid.width, wf = grid.re.dim(3);
  const std::size_t planes = n * c;
  const double norm = 1.0 / static_cast<double>(h * w);
  std::vector<double> out(planes * h * w);
  std::vector<Complex> buf;
  auto re = grid.re.data();
  std::vector<double> im(grid.im.data().begin(), grid.im.data().end());
  for (std::size_t p = 0; p < planes; ++p)
    for (std::size_t k = 0; k < h; ++k)
      for (std::size_t l = 0; l < wf; ++l)
        if (self_conjugate(k, l, h, w)) im[p * h * wf + k * wf + l] = 0.0;
  for (std::size_t p = 0; p < planes; ++p) {
    irfft2_plane_complex(re.data() + p * h * wf, im.data() + p * h * wf, h, w,
                         buf);
    for (std::size_t i = 0; i < h * w; ++i) out[p * h * w + i] = buf[i].real() * norm;
  }
  const Tensor gre = grid.re, gim = grid.im;
  return make_result(
      "ifft2", Shape{n, c, h, w}, std::move(out), {gre, gim},
      [gre, gim, planes, h, w, wf, norm](std::span<const double> g) {
        auto sre = grad_sink(gre);
        auto sim = grad_sink(gim);
        std::vector<double> tre(h * wf), tim(h * wf);
        for (std::size_t p = 0; p < planes; ++p) {
          rfft2_plane(g.data() + p * h * w, h, w, tre.data(), tim.data());
          for (std::size_t k = 0; k < h; ++k)
            for (std::size_t l = 0; l < wf; ++l) {
              // Bins other than DC and Nyquist stand for a conjugate pair.
              const bool single = l == 0 || (w % 2 == 0 && l == w / 2);
              const double f = (single ? 1.0 : 2.0) * norm;
              const std::size_t i = p * h * wf + k * wf + l;
              if (!sre.empty()) sre[i] += f * tre[k * wf + l];
              if (!sim.empty() && !self_conjugate(k, l, h, w)) sim[i] += f * tim[k * wf + l];
            }
        }
      });
}

double ifft2_imag_residue(const ComplexGrid& grid) {
  require_grid("ifft2_imag_residue", grid);
  const std::size_t planes = grid.re.dim(0) * grid.re.dim(1);
  const std::size_t h = grid.re.dim(2), w = grid.width, wf = grid.re.dim(3);
  const double norm = 1.0 / static_cast<double>(h * w);
  double worst = 0.0;
  std::vector<Complex> buf;
  auto re = grid.re.data(), im = grid.im.data();
  for (std::size_t p = 0; p < planes; ++p) {
    irfft2_plane_complex(re.data() + p * h * wf, im.data() + p * h * wf, h, w,
                         buf);
    for (const Complex& v : buf) worst = std::max(worst, std::abs(v.imag()) * norm);
  }
  return worst;
}

ComplexGrid complex_depthwise_conv(const ComplexGrid& grid,
                                   const Tensor& kernel) {
  require_grid("complex_depthwise_conv", grid);
  if (kernel.rank() != 4 || kernel.dim(2) != kernel.dim(3)) {
    throw DimensionError(
        "complex_depthwise_conv: kernel must have shape (C, 1, k, k), got " +
        shape_string(kernel.shape()));
  }
  const std::size_t k = kernel.dim(2);
  if (k % 2 == 0) {
    throw ConfigError("complex_depthwise_conv: kernel size " +
                      std::to_string(k) + " must be odd");
  }
  const std::size_t c = grid.channels();
  if (kernel.dim(0) != c || kernel.dim(1) != 1) {
    throw DimensionError("complex_depthwise_conv: kernel axis 0 must equal " +
                         std::to_string(c) + " channels and axis 1 must be 1");
  }
  ComplexGrid out;
  out.width = grid.width;
  out.re = conv2d(grid.re, kernel, std::nullopt, c, (k - 1) / 2);
  out.im = conv2d(grid.im, kernel, std::nullopt, c, (k - 1) / 2);
  return out;
}

std::pair<ComplexGrid, ComplexGrid> split_channels(const ComplexGrid& grid) {
  require_grid("split_channels", grid);
  const std::size_t c = grid.channels();
  if (c % 2 != 0) {
    throw ConfigError("split_channels: channel count " + std::to_string(c) +
                      " is odd");
  }
  ComplexGrid a{slice_channels(grid.re, 0, c / 2),
                slice_channels(grid.im, 0, c / 2), grid.width};
  ComplexGrid b{slice_channels(grid.re, c / 2, c),
                slice_channels(grid.im, c / 2, c), grid.width};
  return {std::move(a), std::move(b)};
}

ComplexGrid concat_channels(const ComplexGrid& first,
                            const ComplexGrid& second) {
  if (first.width != second.width) {
    throw DimensionError("concat_channels: grids have different widths");
  }
  return ComplexGrid{sdanet::concat_channels({first.re, second.re}),
                     sdanet::concat_channels({first.im, second.im}),
                     first.width};
}

}  // namespace sdanet
