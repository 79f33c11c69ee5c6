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

#include "sdanet/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <ostream>
#include <string>

#include "sdanet/errors.h"
#include "sdanet/ops.h"

namespace sdanet {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

bool same_bits(double a, double b) {
  return std::memcmp(&a, &b, sizeof(double)) == 0;
}

bool same_loss(const LossBreakdown& a, const LossBreakdown& b) {
  return same_bits(a.pix, b.pix) && same_bits(a.sam, b.sam) &&
         same_bits(a.total, b.total) && same_bits(a.lambda, b.lambda);
}

bool same_report(const MetricsReport& a, const MetricsReport& b) {
  return same_bits(a.psnr, b.psnr) && same_bits(a.ssim, b.ssim) &&
         same_bits(a.sam_deg, b.sam_deg) && same_bits(a.cc, b.cc) &&
         same_bits(a.ergas, b.ergas) && a.scale == b.scale;
}

std::uint32_t patch_scale(const PatchPair& p) {
  if (p.lr.height == 0 || p.hr.height % p.lr.height != 0 ||
      p.hr.width != p.lr.width * (p.hr.height / p.lr.height)) {
    throw DimensionError("patch '" + p.hr.name +
                         "': HR extents are not an integer multiple of LR");
  }
  return p.hr.height / p.lr.height;
}

// Yields training indices in seed-determined order, reshuffling each time
// the training set is exhausted.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, std::uint64_t seed) : n_(n), seed_(seed) {}

  std::vector<std::size_t> next(std::size_t batch) {
    std::vector<std::size_t> out;
    while (out.size() < batch) {
      if (cursor_ == order_.size()) {
        order_ = seeded_permutation(n_, seed_ + 0x9E3779B97F4A7C15ull * epoch_++);
        cursor_ = 0;
      }
      out.push_back(order_[cursor_++]);
    }
    return out;
  }

 private:
  std::size_t n_;
  std::uint64_t seed_;
  std::uint64_t epoch_ = 0;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

}  // namespace

void TrainConfig::validate() const {
  if (total_steps < 1) throw ConfigError("total_steps must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(lr0 > 0.0) || !std::isfinite(lr0)) throw ConfigError("lr0 must be > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("lambda must be >= 0");
  }
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) ||
      !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) || !(adam.eps > 0.0)) {
    throw ConfigError("Adam betas must lie in [0, 1) and eps must be > 0");
  }
}

double cosine_lr(std::uint64_t step, std::uint64_t total_steps, double lr0) {
  if (total_steps == 0 || step > total_steps) {
    throw ConfigError("cosine_lr: step " + std::to_string(step) +
                      " outside [0, " + std::to_string(total_steps) + "]");
  }
  const double phase = std::numbers::pi * static_cast<double>(step) /
                       static_cast<double>(total_steps);
  return std::max(0.0, lr0 * 0.5 * (1.0 + std::cos(phase)));
}

void adam_step(std::span<Tensor> params, AdamState& state, double lr,
               const AdamHyper& hyper) {
  if (state.m.empty()) {
    for (const Tensor& p : params) {
      state.m.emplace_back(p.numel(), 0.0);
      state.v.emplace_back(p.numel(), 0.0);
    }
  }
  if (state.m.size() != params.size()) {
    throw DimensionError("adam_step: state holds " +
                         std::to_string(state.m.size()) + " buffers for " +
                         std::to_string(params.size()) + " parameters");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(hyper.beta1, t);
  const double c2 = 1.0 - std::pow(hyper.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto data = params[i].data();
    auto grad = params[i].grad();
    auto& m = state.m[i];
    auto& v = state.v[i];
    if (m.size() != data.size()) {
      throw DimensionError("adam_step: buffer " + std::to_string(i) +
                           " does not match parameter shape " +
                           shape_string(params[i].shape()));
    }
    for (std::size_t j = 0; j < data.size(); ++j) {
      const double g = grad.empty() ? 0.0 : grad[j];
      m[j] = hyper.beta1 * m[j] + (1.0 - hyper.beta1) * g;
      v[j] = hyper.beta2 * v[j] + (1.0 - hyper.beta2) * g * g;
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      data[j] -= lr * m_hat / (std::sqrt(v_hat) + hyper.eps);
    }
  }
}

bool operator==(const TrainHistory& a, const TrainHistory& b) {
  if (a.steps.size() != b.steps.size() || a.evals.size() != b.evals.size())
    return false;
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    if (a.steps[i].step != b.steps[i].step ||
        !same_bits(a.steps[i].lr, b.steps[i].lr) ||
        !same_loss(a.steps[i].loss, b.steps[i].loss))
      return false;
  }
  for (std::size_t i = 0; i < a.evals.size(); ++i) {
    if (a.evals[i].step != b.evals[i].step ||
        !same_report(a.evals[i].report, b.evals[i].report))
      return false;
  }
  return true;
}

std::string format_step_line(const StepRecord& r) {
  return "step=" + std::to_string(r.step) + " lr=" + fmt(r.lr) +
         " pix=" + fmt_fixed(r.loss.pix) + " sam=" + fmt_fixed(r.loss.sam) +
         " total=" + fmt_fixed(r.loss.total);
}

std::string format_eval_line(const EvalRecord& r) {
  const MetricsReport& m = r.report;
  return "step=" + std::to_string(r.step) + " psnr=" + fmt_fixed(m.psnr) +
         " ssim=" + fmt_fixed(m.ssim) + " sam_deg=" + fmt_fixed(m.sam_deg) +
         " cc=" + fmt_fixed(m.cc) + " ergas=" + fmt_fixed(m.ergas);
}

TrainHistory train(SdanetModel& model, const std::vector<PatchPair>& train_set,
                   const std::vector<PatchPair>& val_set,
                   const TrainConfig& config) {
  config.validate();
  if (train_set.empty()) throw ConfigError("train: no training patches");
  for (const PatchPair& p : train_set) {
    if (patch_scale(p) != model.config.scale || p.lr.bands != model.config.bands) {
      throw DimensionError("train: patch '" + p.hr.name +
                           "' does not match the model's bands/scale");
    }
  }

  std::vector<Tensor> params;
  for (const Parameter& p : model.parameters) params.push_back(p.value);
  AdamState adam;
  BatchSampler sampler(train_set.size(), config.seed);
  TrainHistory history;

  for (std::uint32_t step = 1; step <= config.total_steps; ++step) {
    const std::vector<std::size_t> picks = sampler.next(config.batch_size);
    std::vector<const HsiCube*> lr_cubes, hr_cubes;
    for (std::size_t i : picks) {
      lr_cubes.push_back(&train_set[i].lr);
      hr_cubes.push_back(&train_set[i].hr);
    }
    const Tensor lr_batch = stack_cubes(lr_cubes);
    const Tensor hr_batch = stack_cubes(hr_cubes);

    model.zero_grad();
    const Tensor pred = sdanet_forward(lr_batch, model);
    const Objective objective = total_loss(pred, hr_batch, config.lambda);
    if (!std::isfinite(objective.breakdown.total)) {
      throw DivergenceError("train: loss became " +
                            std::to_string(objective.breakdown.total) +
                            " at step " + std::to_string(step));
    }
    backward(objective.total);
    const double lr = cosine_lr(step - 1, config.total_steps, config.lr0);
    adam_step(params, adam, lr, config.adam);

    StepRecord rec{step, lr, objective.breakdown};
    history.steps.push_back(rec);
    if (config.log) *config.log << format_step_line(rec) << '\n';

    if (config.eval_every > 0 && step % config.eval_every == 0 &&
        !val_set.empty()) {
      EvalRecord ev{step, evaluate_model(model, val_set)};
      history.evals.push_back(ev);
      if (config.log) *config.log << format_eval_line(ev) << '\n';
    }
  }
  model.zero_grad();
  if (!config.checkpoint_path.empty()) save_checkpoint(model, config.checkpoint_path);
  return history;
}

HsiCube super_resolve(const SdanetModel& model, const HsiCube& lr) {
  NoGradGuard no_grad;
  const HsiCube* one[] = {&lr};
  const Tensor out = sdanet_forward(stack_cubes(one), model);
  const Tensor image = reshape(out, {out.dim(1), out.dim(2), out.dim(3)});
  return tensor_to_cube(image, lr.name);
}

MetricsReport evaluate_model(const SdanetModel& model,
                             const std::vector<PatchPair>& patches) {
  if (patches.empty()) throw ConfigError("evaluate_model: no patches");
  std::vector<MetricsReport> reports;
  for (const PatchPair& p : patches) {
    reports.push_back(evaluate_all(super_resolve(model, p.lr), p.hr,
                                   model.config.scale));
  }
  return average_reports(reports);
}

MetricsReport evaluate_bicubic(const std::vector<PatchPair>& patches,
                               std::uint32_t scale) {
  if (patches.empty()) throw ConfigError("evaluate_bicubic: no patches");
  std::vector<MetricsReport> reports;
  for (const PatchPair& p : patches) {
    const HsiCube up = bicubic_resize(p.lr, p.lr.height * scale, p.lr.width * scale);
    reports.push_back(evaluate_all(up, p.hr, scale));
  }
  return average_reports(reports);
}

std::vector<AblationRow> run_ablation(const SdanetConfig& base,
                                      const TrainConfig& config,
                                      const std::vector<PatchPair>& train_set,
                                      const std::vector<PatchPair>& val_set,
                                      std::span<const Variant> variants) {
  if (val_set.empty()) throw ConfigError("run_ablation: no validation patches");
  std::vector<AblationRow> rows;
  for (Variant v : variants) {
    SdanetConfig cfg = base;
    cfg.variant = v;
    SdanetModel model = init_params(cfg);
    TrainConfig tc = config;
    tc.checkpoint_path.clear();
    const TrainHistory h = train(model, train_set, val_set, tc);
    rows.push_back(AblationRow{v, count_params(model), h.steps.back().loss,
                               evaluate_model(model, val_set)});
  }
  return rows;
}

std::vector<SweepRow> lambda_sweep(const SdanetConfig& base,
                                   const TrainConfig& config,
                                   const std::vector<PatchPair>& train_set,
                                   const std::vector<PatchPair>& val_set,
                                   std::span<const double> lambdas) {
  if (val_set.empty()) throw ConfigError("lambda_sweep: no validation patches");
  for (double l : lambdas) {
    if (!(l >= 0.0)) throw ConfigError("lambda_sweep: lambda must be >= 0");
  }
  std::vector<SweepRow> rows;
  for (double l : lambdas) {
    SdanetModel model = init_params(base);
    TrainConfig tc = config;
    tc.lambda = l;
    tc.checkpoint_path.clear();
    const TrainHistory h = train(model, train_set, val_set, tc);
    rows.push_back(SweepRow{l, h.steps.back().loss, evaluate_model(model, val_set)});
  }
  return rows;
}

}  // namespace sdanet
