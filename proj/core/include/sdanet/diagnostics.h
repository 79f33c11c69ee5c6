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

#ifndef SDANET_DIAGNOSTICS_H_
#define SDANET_DIAGNOSTICS_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sdanet/grad_check.h"
#include "sdanet/model.h"

namespace sdanet {

struct ModuleGradReport {
  std::string module;  // "dcsa", "feffn", "sdab", "model"
  GradCheckResult result;
  std::string worst_param;  // name of the tensor holding the worst coordinate
};

// Finite-difference check of the attention, feed-forward, block and
// full-network gradients on a freshly initialized model of `config` (first
// block only for the module checks) with size x size LR inputs. The gate
// surrogate is disabled so that analytic and numeric derivatives describe the
// same function. Parameters are perturbed away from their initial values so
// that zero-initialized biases do not hide errors.
std::vector<ModuleGradReport> gradcheck_modules(const SdanetConfig& config,
                                                std::size_t size,
                                                std::uint64_t seed,
                                                const GradCheckOptions& options);

std::string format_grad_report(const ModuleGradReport& r);

}  // namespace sdanet

#endif  // SDANET_DIAGNOSTICS_H_
