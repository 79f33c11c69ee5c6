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

#ifndef SDANET_FEFFN_H_
#define SDANET_FEFFN_H_

#include <cstddef>
#include <utility>

#include "sdanet/ops.h"
#include "sdanet/spectral.h"
#include "sdanet/tensor.h"

namespace sdanet {

inline constexpr std::size_t kFeffnExpansion = 2;

// Frequency-enhanced feed-forward parameters for C input channels and an
// expanded width E = 2C.
struct FeffnParams {
  ConvParams expand_proj;     // (E, C, 1, 1)
  Tensor freq_kernel_5;       // (E, 1, 5, 5), no bias
  Tensor freq_kernel_3;       // (E, 1, 3, 3), no bias
  ConvParams spatial_dconv_5; // (E, 1, 5, 5) depthwise
  ConvParams spatial_dconv_3; // (E, 1, 3, 3) depthwise
  ConvParams out_proj;        // (C, 2E, 1, 1)
};

using GridHalves = std::pair<ComplexGrid, ComplexGrid>;

// Filters the spectrum with one frequency kernel and splits the channels into
// the (a, b) halves.
GridHalves frequency_branch(const ComplexGrid& spectrum, const Tensor& kernel);
GridHalves frequency_branch(const Tensor& expanded, const Tensor& kernel);

// Swaps the leading halves between branches:
//   first  = [a of branch 3, b of branch 5]
//   second = [a of branch 5, b of branch 3]
std::pair<ComplexGrid, ComplexGrid> cross_frequency_exchange(
    const GridHalves& branch5, const GridHalves& branch3);

Tensor feffn_forward(const Tensor& x, const FeffnParams& params);

}  // namespace sdanet

#endif  // SDANET_FEFFN_H_
