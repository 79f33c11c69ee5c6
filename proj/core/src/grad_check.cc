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

#include "sdanet/grad_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "sdanet/errors.h"

namespace sdanet {

namespace {

double evaluate(const std::function<Tensor()>& f) {
  NoGradGuard guard;
  const double v = f().item();
  if (!std::isfinite(v)) {
    throw EvaluationError("grad_check: function returned a non-finite value");
  }
  return v;
}

}  // namespace

GradCheckResult grad_check(const std::function<Tensor()>& f,
                           std::span<Tensor> params,
                           const GradCheckOptions& options) {
  if (!(options.eps >= 1e-6 && options.eps <= 1e-4)) {
    throw ConfigError("grad_check: eps must lie in [1e-6, 1e-4]");
  }
  for (Tensor& p : params) {
    if (!p.is_leaf() || !p.requires_grad()) {
      throw ContractError("grad_check: parameters must be leaves requiring grad");
    }
    p.zero_grad();
  }

  Tensor loss = f();
  if (!std::isfinite(loss.item())) {
    throw EvaluationError("grad_check: function returned a non-finite value");
  }
  backward(loss);
  std::vector<std::vector<double>> analytic;
  for (Tensor& p : params) {
    auto g = p.grad();
    analytic.emplace_back(g.begin(), g.end());
    if (analytic.back().empty()) analytic.back().assign(p.numel(), 0.0);
    p.zero_grad();
  }

  std::mt19937_64 rng(options.seed);
  GradCheckResult result;
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto values = params[t].data();
    std::vector<std::size_t> coords(values.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (options.max_coords_per_tensor != 0 &&
        coords.size() > options.max_coords_per_tensor) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.max_coords_per_tensor);
      std::sort(coords.begin(), coords.end());
    }
    for (std::size_t i : coords) {
      const double saved = values[i];
      values[i] = saved + options.eps;
      const double up = evaluate(f);
      values[i] = saved - options.eps;
      const double down = evaluate(f);
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * options.eps);
      const double a = analytic[t][i];
      const double denom =
          std::max({std::abs(a), std::abs(numeric), options.abs_floor});
      const double rel = std::abs(a - numeric) / denom;
      ++result.coords_checked;
      if (result.coords_checked == 1 || rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_tensor = t;
        result.worst_index = i;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace sdanet
