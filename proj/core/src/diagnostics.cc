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

#include "sdanet/diagnostics.h"

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "sdanet/errors.h"
#include "sdanet/objective.h"
#include "sdanet/ops.h"

namespace sdanet {

namespace {

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 rng_;
};

Tensor random_tensor(Shape shape, Uniform& u, double lo, double hi,
                     bool requires_grad) {
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = u(lo, hi);
  if (requires_grad) t.set_requires_grad(true);
  return t;
}

struct Target {
  std::vector<Tensor> tensors;
  std::vector<std::string> names;

  void add(const std::string& name, const Tensor& t) {
    tensors.push_back(t);
    names.push_back(name);
  }
};

void add_prefixed(Target& target, const SdanetModel& model,
                  const std::string& prefix) {
  for (const Parameter& p : model.parameters) {
    if (p.name.rfind(prefix, 0) == 0) target.add(p.name, p.value);
  }
}

ModuleGradReport check(const std::string& module, Target& target,
                       const std::function<Tensor()>& f,
                       const GradCheckOptions& options) {
  ModuleGradReport r;
  r.module = module;
  r.result = grad_check(f, target.tensors, options);
  r.worst_param = target.names.at(r.result.worst_tensor);
  return r;
}

}  // namespace

std::vector<ModuleGradReport> gradcheck_modules(const SdanetConfig& config,
                                                std::size_t size,
                                                std::uint64_t seed,
                                                const GradCheckOptions& options) {
  if (size == 0) throw ConfigError("gradcheck: size must be positive");
  SdanetModel model = init_params(config);
  Uniform u(seed);
  for (Parameter& p : model.parameters)
    for (double& v : p.value.data()) v += u(-0.1, 0.1);

  const std::size_t c = config.feat_channels;
  const BudgetPolicy policy = budget_policy(config.variant);
  const SdabParams& block = model.blocks.at(0);
  ForwardOptions fwd;
  fwd.gate_surrogate = false;
  std::vector<ModuleGradReport> out;

  const Tensor features = random_tensor({1, c, size, size}, u, -1.0, 1.0, true);
  const Tensor probe = random_tensor({1, c, size, size}, u, -1.0, 1.0, false);
  auto weighted = [&probe](const Tensor& y) { return sum(mul(y, probe)); };

  if (block.dcsa) {
    Target t;
    t.add("input", features);
    add_prefixed(t, model, "blocks.0.dcsa.");
    DcsaOptions opts{policy, false};
    out.push_back(check("dcsa", t, [&] {
      return weighted(dcsa_forward(features, *block.dcsa, opts));
    }, options));
  }
  if (block.feffn) {
    Target t;
    t.add("input", features);
    add_prefixed(t, model, "blocks.0.feffn.");
    out.push_back(check("feffn", t, [&] {
      return weighted(feffn_forward(features, *block.feffn));
    }, options));
  }
  {
    Target t;
    t.add("input", features);
    add_prefixed(t, model, "blocks.0.");
    out.push_back(check("sdab", t, [&] {
      return weighted(sdab_forward(features, block, policy, fwd));
    }, options));
  }
  {
    const std::size_t hr = size * config.scale;
    const Tensor lr = random_tensor({1, config.bands, size, size}, u, 0.0, 1.0, true);
    const Tensor gt = random_tensor({1, config.bands, hr, hr}, u, 0.0, 1.0, false);
    Target t;
    t.add("input", lr);
    for (const Parameter& p : model.parameters) t.add(p.name, p.value);
    out.push_back(check("model", t, [&] {
      return total_loss(sdanet_forward(lr, model, fwd), gt).total;
    }, options));
  }
  return out;
}

std::string format_grad_report(const ModuleGradReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "module=%s max_rel_err=%.3e coords=%zu worst=%s[%zu]",
                r.module.c_str(), r.result.max_rel_error,
                r.result.coords_checked, r.worst_param.c_str(),
                r.result.worst_index);
  return buf;
}

}  // namespace sdanet
