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

#include "sdanet/feffn.h"

#include <string>

#include "sdanet/errors.h"

namespace sdanet {

GridHalves frequency_branch(const ComplexGrid& spectrum, const Tensor& kernel) {
  if (spectrum.channels() % 2 != 0) {
    throw ConfigError("frequency_branch: expanded channel count " +
                      std::to_string(spectrum.channels()) + " is odd");
  }
  return split_channels(complex_depthwise_conv(spectrum, kernel));
}

GridHalves frequency_branch(const Tensor& expanded, const Tensor& kernel) {
  if (expanded.rank() == 4 && expanded.dim(1) % 2 != 0) {
    throw ConfigError("frequency_branch: expanded channel count " +
                      std::to_string(expanded.dim(1)) + " is odd");
  }
  return frequency_branch(fft2(expanded), kernel);
}

std::pair<ComplexGrid, ComplexGrid> cross_frequency_exchange(
    const GridHalves& branch5, const GridHalves& branch3) {
  return {concat_channels(branch3.first, branch5.second),
          concat_channels(branch5.first, branch3.second)};
}

Tensor feffn_forward(const Tensor& x, const FeffnParams& params) {
  if (x.rank() != 4) {
    throw DimensionError("feffn_forward: input must be rank 4 (N, C, H, W), got " +
                         shape_string(x.shape()));
  }
  Tensor expanded = gelu(conv2d(x, params.expand_proj, 1, 0));
  const std::size_t e = expanded.dim(1);
  ComplexGrid spectrum = fft2(expanded);
  GridHalves b5 = frequency_branch(spectrum, params.freq_kernel_5);
  GridHalves b3 = frequency_branch(spectrum, params.freq_kernel_3);
  auto [mixed5, mixed3] = cross_frequency_exchange(b5, b3);
  Tensor z5 = ifft2(mixed5);
  Tensor z3 = ifft2(mixed3);
  Tensor u = concat_channels({conv2d(z5, params.spatial_dconv_5, e, 2),
                              conv2d(z3, params.spatial_dconv_3, e, 1)});
  return conv2d(u, params.out_proj, 1, 0);
}

}  // namespace sdanet
