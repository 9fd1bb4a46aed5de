// Copyright 2026 The hllc Authors. All Rights Reserved.
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

#include <vector>

#include "hllc/ans.h"
#include "hllc/bbans.h"
#include "hllc/random.h"
#include "hllc/toy_models.h"
#include "hllc/vector_ans.h"

namespace {

hllc::QuantizedDistribution SkewedDistribution() {
  std::vector<double> pmf(256);
  for (size_t s = 0; s < pmf.size(); ++s) pmf[s] = 1.0 / (1.0 + s);
  return hllc::Quantize(pmf, 16);
}

std::vector<uint32_t> Symbols(const hllc::QuantizedDistribution& d, size_t n) {
  hllc::Rng rng(7);
  std::vector<uint32_t> out(n);
  for (uint32_t& s : out) {
    s = d.SymbolForSlot(static_cast<uint32_t>(rng.Below(1u << d.precision())));
  }
  return out;
}

void BM_ScalarPush(benchmark::State& state) {
  const auto d = SkewedDistribution();
  const auto symbols = Symbols(d, 1 << 16);
  for (auto _ : state) {
    hllc::ScalarAnsState s;
    s.stream.reserve(symbols.size());
    for (uint32_t sym : symbols) s = hllc::Push(std::move(s), sym, d);
    benchmark::DoNotOptimize(s.head);
  }
  state.SetItemsProcessed(state.iterations() * symbols.size());
}
BENCHMARK(BM_ScalarPush);

void BM_ScalarPop(benchmark::State& state) {
  const auto d = SkewedDistribution();
  const auto symbols = Symbols(d, 1 << 16);
  hllc::ScalarAnsState full;
  for (uint32_t sym : symbols) full = hllc::Push(std::move(full), sym, d);
  for (auto _ : state) {
    hllc::ScalarAnsState s = full;
    for (size_t k = 0; k < symbols.size(); ++k) {
      s = hllc::Pop(std::move(s), d).first;
    }
    benchmark::DoNotOptimize(s.head);
  }
  state.SetItemsProcessed(state.iterations() * symbols.size());
}
BENCHMARK(BM_ScalarPop);

void BM_VectorPush(benchmark::State& state) {
  const size_t lanes = static_cast<size_t>(state.range(0));
  const auto d = SkewedDistribution();
  const auto symbols = Symbols(d, lanes);
  for (auto _ : state) {
    hllc::ShapedMessage msg(hllc::HeadShape::Flat(lanes));
    for (int round = 0; round < 16; ++round) {
      hllc::VPushInPlace(msg, msg.all_lanes(), symbols, std::span(&d, 1));
    }
    benchmark::DoNotOptimize(msg.stream().data());
  }
  state.SetItemsProcessed(state.iterations() * lanes * 16);
}
BENCHMARK(BM_VectorPush)->RangeMultiplier(16)->Range(16, 1 << 16);

void BM_VectorPop(benchmark::State& state) {
  const size_t lanes = static_cast<size_t>(state.range(0));
  const auto d = SkewedDistribution();
  const auto symbols = Symbols(d, lanes);
  hllc::ShapedMessage full(hllc::HeadShape::Flat(lanes));
  for (int round = 0; round < 16; ++round) {
    hllc::VPushInPlace(full, full.all_lanes(), symbols, std::span(&d, 1));
  }
  std::vector<uint32_t> out(lanes);
  for (auto _ : state) {
    hllc::ShapedMessage msg = full;
    for (int round = 0; round < 16; ++round) {
      hllc::VPopInPlace(msg, msg.all_lanes(), std::span(&d, 1), out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * lanes * 16);
}
BENCHMARK(BM_VectorPop)->RangeMultiplier(16)->Range(16, 1 << 16);

void BM_FlattenUnflatten(benchmark::State& state) {
  const size_t lanes = static_cast<size_t>(state.range(0));
  const hllc::HeadShape shape = hllc::HeadShape::Flat(lanes);
  for (auto _ : state) {
    const auto words = hllc::Flatten(hllc::ShapedMessage(shape));
    benchmark::DoNotOptimize(hllc::Unflatten(words, shape).head().data());
  }
}
BENCHMARK(BM_FlattenUnflatten)->RangeMultiplier(16)->Range(16, 1 << 16);

void BM_BbansPush(benchmark::State& state) {
  const auto model = hllc::ModelById(static_cast<uint8_t>(state.range(0)));
  const hllc::Shape3 shape{16, 16, 1};
  hllc::Rng rng(3);
  const hllc::Image x = hllc::SampleImage(*model, shape, rng);
  const hllc::BbansConfig config;
  const hllc::HeadShape head = hllc::BbansHeadShape(*model, shape);
  const auto seed = hllc::RandomSeedWords(
      2 + hllc::WorstCaseGrowWords(1, head.lane_count()) +
          hllc::LatentDims(*model, shape),
      rng);
  for (auto _ : state) {
    hllc::ShapedMessage msg = hllc::Unflatten(seed, head);
    hllc::BbansPush(msg, x, *model, config);
    benchmark::DoNotOptimize(msg.stream().data());
  }
  state.SetItemsProcessed(state.iterations() * shape.size());
}
BENCHMARK(BM_BbansPush)->DenseRange(1, 3);

}  // namespace

BENCHMARK_MAIN();
