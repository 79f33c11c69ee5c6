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

#ifndef SDANET_OBJECTIVE_H_
#define SDANET_OBJECTIVE_H_

#include <cstdint>
#include <string>

#include "sdanet/tensor.h"

namespace sdanet {

// Weight of the spectral-angle term in the training objective.
inline constexpr double kDefaultSamWeight = 0.2;

struct LossBreakdown {
  double pix = 0.0;
  double sam = 0.0;
  double total = 0.0;
  double lambda = kDefaultSamWeight;
};

struct Objective {
  Tensor total;  // differentiable scalar
  LossBreakdown breakdown;
};

// Mean absolute error over every element of the batch.
Tensor l1_loss(const Tensor& pred, const Tensor& gt);

// Mean over pixels of angle(pred spectrum, gt spectrum) / pi for (N, B, H, W)
// tensors. Pixels where either spectrum has norm below 1e-8 count as angle 0.
// The gradient vanishes where |cos| >= 1 - 1e-7.
Tensor sam_loss(const Tensor& pred, const Tensor& gt);

// pix + lambda * sam.
Objective total_loss(const Tensor& pred, const Tensor& gt,
                     double lambda = kDefaultSamWeight);

}  // namespace sdanet

#endif  // SDANET_OBJECTIVE_H_
