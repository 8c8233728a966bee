// Copyright 2026 The amm-align Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "amm/losses.hpp"
#include "amm/projection.hpp"
#include "amm/retrieval.hpp"
#include "amm/similarity.hpp"

namespace {

amm::Matrix gaussian(std::size_t rows, std::size_t cols, amm::Rng& rng) {
  amm::Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.normal();
  return m;
}

void BM_BidirectionalLoss(benchmark::State& state) {
  const auto kind = static_cast<amm::LossKind>(state.range(0));
  const auto b = static_cast<std::size_t>(state.range(1));
  amm::Rng rng(1);
  const amm::SimilarityMatrix s{gaussian(b, b, rng)};
  const amm::LossParams params;
  for (auto _ : state) benchmark::DoNotOptimize(amm::bidirectional_loss(kind, s, params));
  state.SetLabel(std::string(amm::to_string(kind)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(b * b));
}

void loss_args(benchmark::internal::Benchmark* bench) {
  for (auto kind : {amm::LossKind::nce, amm::LossKind::shn, amm::LossKind::mms, amm::LossKind::amm})
    for (int b : {64, 256, 1024}) bench->Args({static_cast<int>(kind), b});
}
BENCHMARK(BM_BidirectionalLoss)->Apply(loss_args);

void BM_HeadForwardBackward(benchmark::State& state) {
  const auto b = static_cast<std::size_t>(state.range(0));
  const auto width = static_cast<std::size_t>(state.range(1));
  amm::Rng rng(2);
  const auto head = amm::head_init({64, width, width}, rng);
  const auto x = gaussian(b, 64, rng);
  const auto grad = gaussian(b, width, rng);
  for (auto _ : state) {
    const auto fwd = amm::head_forward(head, x);
    benchmark::DoNotOptimize(amm::head_backward(head, fwd.cache, grad));
  }
}
BENCHMARK(BM_HeadForwardBackward)->Args({256, 32})->Args({256, 256})->Args({1024, 256});

void BM_SimilarityForward(benchmark::State& state) {
  const auto b = static_cast<std::size_t>(state.range(0));
  amm::Rng rng(3);
  const auto x = gaussian(b, 128, rng);
  const auto y = gaussian(b, 128, rng);
  for (auto _ : state) benchmark::DoNotOptimize(amm::similarity_forward(x, y));
}
BENCHMARK(BM_SimilarityForward)->Arg(256)->Arg(1024);

void BM_RetrievalMetrics(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  amm::Rng rng(4);
  const amm::SimilarityMatrix s{gaussian(n, n, rng)};
  for (auto _ : state) benchmark::DoNotOptimize(amm::retrieval_metrics(s));
}
BENCHMARK(BM_RetrievalMetrics)->Arg(200)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
