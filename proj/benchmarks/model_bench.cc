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

#include <benchmark/benchmark.h>

#include <random>

#include "sdanet/model.h"
#include "sdanet/objective.h"

namespace {

using namespace sdanet;

SdanetModel toy_model() {
  SdanetConfig c;
  c.bands = 8;
  c.feat_channels = 16;
  c.num_blocks = 2;
  c.scale = 2;
  return init_params(c);
}

Tensor input(std::size_t n, std::size_t size, std::uint64_t seed) {
  Tensor t({n, 8, size, size});
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& v : t.data()) v = u(gen);
  return t;
}

void BM_ForwardInference(benchmark::State& state) {
  const SdanetModel model = toy_model();
  const Tensor lr = input(1, static_cast<std::size_t>(state.range(0)), 1);
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(sdanet_forward(lr, model));
}
BENCHMARK(BM_ForwardInference)->Arg(16)->Arg(32);

void BM_TrainingStep(benchmark::State& state) {
  SdanetModel model = toy_model();
  const Tensor lr = input(8, 16, 2);
  const Tensor hr = input(8, 32, 3);
  for (auto _ : state) {
    model.zero_grad();
    Tensor loss = total_loss(sdanet_forward(lr, model), hr).total;
    backward(loss);
    benchmark::DoNotOptimize(loss.item());
  }
}
BENCHMARK(BM_TrainingStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
