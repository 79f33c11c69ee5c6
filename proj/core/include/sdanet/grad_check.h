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

#ifndef SDANET_GRAD_CHECK_H_
#define SDANET_GRAD_CHECK_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "sdanet/tensor.h"

namespace sdanet {

struct GradCheckOptions {
  double eps = 1e-6;
  // Coordinates sampled per tensor; 0 checks every coordinate.
  std::size_t max_coords_per_tensor = 0;
  std::uint64_t seed = 0;
  // Lower bound of the relative-error denominator max(|analytic|, |numeric|).
  double abs_floor = 1e-8;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t coords_checked = 0;
  // Location of the worst coordinate.
  std::size_t worst_tensor = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Compares backward() gradients of the scalar `f` against central
// differences (f(t + eps) - f(t - eps)) / (2 eps) on the tensors in `params`.
// Relative error uses max(|analytic|, |numeric|, 1e-8) as denominator.
// `params` must be leaf tensors with requires_grad set; their gradients are
// zeroed before and after the check.
GradCheckResult grad_check(const std::function<Tensor()>& f,
                           std::span<Tensor> params,
                           const GradCheckOptions& options = {});

}  // namespace sdanet

#endif  // SDANET_GRAD_CHECK_H_
