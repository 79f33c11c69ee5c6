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

#ifndef SDANET_SPECTRAL_H_
#define SDANET_SPECTRAL_H_

#include <cstddef>
#include <utility>

#include "sdanet/tensor.h"

namespace sdanet {

// Half spectrum of real (N, C, H, W) features: real and imaginary planes of
// shape (N, C, H, W/2 + 1). `width` keeps W so the inverse is exact.
struct ComplexGrid {
  Tensor re;
  Tensor im;
  std::size_t width = 0;

  const Shape& shape() const { return re.shape(); }
  std::size_t channels() const { return re.dim(1); }
};

// Unnormalized forward 2-D DFT of every (H, W) plane, reduced along width.
// Differentiable in x.
ComplexGrid fft2(const Tensor& x);

// Inverse of fft2 with the 1/(H*W) factor. The half spectrum is completed by
// Hermitian symmetry, so the result is real; imaginary parts of self-paired
// bins (DC and Nyquist columns) are discarded. Differentiable in both planes.
Tensor ifft2(const ComplexGrid& grid);

// Largest |imaginary part| of the full complex inverse implied by `grid`
// (what ifft2 discards). Zero for spectra of real signals up to round-off.
double ifft2_imag_residue(const ComplexGrid& grid);

// Depthwise k x k convolution (odd k, zero padding (k-1)/2) of the frequency
// grid with a real kernel of shape (C, 1, k, k) shared by both planes.
ComplexGrid complex_depthwise_conv(const ComplexGrid& grid,
                                   const Tensor& kernel);

// Channel halves of a grid; the channel count must be even.
std::pair<ComplexGrid, ComplexGrid> split_channels(const ComplexGrid& grid);
ComplexGrid concat_channels(const ComplexGrid& first,
                            const ComplexGrid& second);

}  // namespace sdanet

#endif  // SDANET_SPECTRAL_H_
