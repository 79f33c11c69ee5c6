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

#ifndef SDANET_TRAINER_H_
#define SDANET_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sdanet/data.h"
#include "sdanet/metrics.h"
#include "sdanet/model.h"
#include "sdanet/objective.h"
#include "sdanet/tensor.h"

namespace sdanet {

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainConfig {
  std::uint32_t batch_size = 16;
  double lr0 = 1e-4;
  std::uint32_t total_steps = 1;
  double lambda = kDefaultSamWeight;
  AdamHyper adam;
  std::uint64_t seed = 0;
  std::uint32_t eval_every = 0;  // 0 disables periodic evaluation
  std::string checkpoint_path;   // empty: no checkpoint written
  std::ostream* log = nullptr;   // receives history lines as they happen

  void validate() const;
};

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t step = 0;
};

// lr0 * (1 + cos(pi * step / total_steps)) / 2, floored at zero.
double cosine_lr(std::uint64_t step, std::uint64_t total_steps, double lr0);

// One bias-corrected Adam update of every tensor in `params` from its
// accumulated gradient (a tensor with no gradient counts as zero gradient).
void adam_step(std::span<Tensor> params, AdamState& state, double lr,
               const AdamHyper& hyper = {});

struct StepRecord {
  std::uint32_t step = 0;
  double lr = 0.0;
  LossBreakdown loss;
};

struct EvalRecord {
  std::uint32_t step = 0;
  MetricsReport report;
};

struct TrainHistory {
  std::vector<StepRecord> steps;
  std::vector<EvalRecord> evals;
};

bool operator==(const TrainHistory& a, const TrainHistory& b);

std::string format_step_line(const StepRecord& r);
std::string format_eval_line(const EvalRecord& r);

// Optimizes `model` in place. Deterministic for a fixed config, model
// initialization and patch list. Throws DivergenceError on a non-finite loss.
TrainHistory train(SdanetModel& model, const std::vector<PatchPair>& train_set,
                   const std::vector<PatchPair>& val_set,
                   const TrainConfig& config);

// Model output for one LR cube, clamped to [0, 1].
HsiCube super_resolve(const SdanetModel& model, const HsiCube& lr);

// Metrics averaged over patches.
MetricsReport evaluate_model(const SdanetModel& model,
                             const std::vector<PatchPair>& patches);
MetricsReport evaluate_bicubic(const std::vector<PatchPair>& patches,
                               std::uint32_t scale);

struct AblationRow {
  Variant variant = Variant::kFull;
  std::size_t param_count = 0;
  LossBreakdown final_loss;
  MetricsReport report;
};

// Trains every variant from the same seed, data and schedule.
std::vector<AblationRow> run_ablation(const SdanetConfig& base,
                                      const TrainConfig& config,
                                      const std::vector<PatchPair>& train_set,
                                      const std::vector<PatchPair>& val_set,
                                      std::span<const Variant> variants);

struct SweepRow {
  double lambda = 0.0;
  LossBreakdown final_loss;
  MetricsReport report;
};

std::vector<SweepRow> lambda_sweep(const SdanetConfig& base,
                                   const TrainConfig& config,
                                   const std::vector<PatchPair>& train_set,
                                   const std::vector<PatchPair>& val_set,
                                   std::span<const double> lambdas);

}  // namespace sdanet

#endif  // SDANET_TRAINER_H_
