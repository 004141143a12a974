// Copyright 2026 The nlts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "nlts/embedding.hpp"
#include "nlts/invariants.hpp"
#include "nlts/lyapunov.hpp"
#include "nlts/neighbors.hpp"
#include "nlts/random.hpp"
#include "nlts/refsys.hpp"
#include "nlts/symmetry.hpp"

namespace {

using namespace nlts;

DelayEmbedding henon_embedding(std::size_t n) {
  const TimeSeries s = generate(catalog("henon"), n);
  return embed(TimeSeries::scalar(s.channel(0)), 2, 1);
}

void BM_IndexBuild(benchmark::State& state) {
  const DelayEmbedding e = henon_embedding(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    NeighborIndex idx(e, 1);
    benchmark::DoNotOptimize(&idx);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IndexBuild)->Arg(10000)->Arg(100000);

void BM_Knn(benchmark::State& state) {
  const DelayEmbedding e = henon_embedding(50000);
  const NeighborIndex idx(e, 1);
  const auto k = static_cast<std::size_t>(state.range(0));
  std::size_t row = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(idx.knn(row, k));
    row = (row + 7919) % e.rows();
  }
}
BENCHMARK(BM_Knn)->Arg(1)->Arg(8)->Arg(32);

void BM_CorrelationIntegral(benchmark::State& state) {
  const DelayEmbedding e = henon_embedding(static_cast<std::size_t>(state.range(0)));
  const auto eps = default_epsilon_grid(e);
  for (auto _ : state) benchmark::DoNotOptimize(correlation_integral(e, eps, default_theiler(e)));
}
BENCHMARK(BM_CorrelationIntegral)->Arg(2000)->Arg(5000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_BenettinExact(benchmark::State& state) {
  const ReferenceSystem lorenz = catalog("lorenz");
  BenettinExactParams p;
  p.steps = static_cast<std::size_t>(state.range(0));
  p.dt = 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(benettin_spectrum(lorenz, p));
}
BENCHMARK(BM_BenettinExact)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_BenettinData(benchmark::State& state) {
  const DelayEmbedding e = henon_embedding(20000);
  const NeighborIndex idx(e, default_theiler(e));
  BenettinDataParams p;
  p.steps = 5000;
  for (auto _ : state) benchmark::DoNotOptimize(benettin_spectrum(e, idx, p));
}
BENCHMARK(BM_BenettinData)->Unit(benchmark::kMillisecond);

void BM_ContourSymmetry(benchmark::State& state) {
  const auto m = static_cast<Eigen::Index>(state.range(0));
  Rng rng(kDefaultSeed);
  Eigen::MatrixXd a(m, 3), b(m, 3);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a.data()[i] = rng.normal();
    b.data()[i] = rng.normal();
  }
  const Contour ca(a), cb(b);
  for (auto _ : state) benchmark::DoNotOptimize(symmetry_between(ca, cb));
}
BENCHMARK(BM_ContourSymmetry)->Arg(16)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
