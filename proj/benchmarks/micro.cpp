// Copyright 2026 The tigames Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include <benchmark/benchmark.h>

#include "tigames/meanfield.hpp"
#include "tigames/model.hpp"
#include "tigames/nplayer.hpp"
#include "tigames/presets.hpp"
#include "tigames/regression.hpp"
#include "tigames/rng.hpp"
#include "tigames/sde.hpp"

namespace tigames {
namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = philox_normal(seed, i, 0, 0);
  return v;
}

void BM_PhiloxNormal(benchmark::State& state) {
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(philox_normal(7, i++, 3, 11));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PhiloxNormal);

void BM_Wasserstein2(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> a = normals(n, 1), b = normals(n / 2 + 1, 2);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein_1d(a, b, 2));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Wasserstein2)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

void BM_Regression(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  RegressionBasis basis;
  basis.degree = 3;
  const std::size_t p = basis.size(true);
  const std::vector<double> x = normals(m, 3), xbar = normals(m, 4), y = normals(m, 5);
  std::vector<double> design(m * p);
  for (std::size_t i = 0; i < m; ++i) basis.features(x[i], xbar[i], true, {design.data() + i * p, p});
  for (auto _ : state) benchmark::DoNotOptimize(regress_conditional_expectation(y, design, p, 0.0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}
BENCHMARK(BM_Regression)->RangeMultiplier(4)->Range(1 << 12, 1 << 16)->Unit(benchmark::kMillisecond);

void BM_BackwardSweepEx1(benchmark::State& state) {
  const GameSpec spec = ex1_game(LQParams{});
  const TimeGrid grid{1.0, 50};
  const ControlField zero = [](std::size_t, double, std::span<const double>, std::span<double> a) {
    std::fill(a.begin(), a.end(), 0.0);
  };
  const PathEnsemble ens = simulate_paths(spec, grid, zero, static_cast<std::size_t>(state.range(0)), {11});
  RegressionBasis basis;
  for (auto _ : state) benchmark::DoNotOptimize(backward_sweep(spec, ens, basis));
}
BENCHMARK(BM_BackwardSweepEx1)->Arg(1 << 12)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

void BM_SimulateEx1(benchmark::State& state) {
  const GameSpec spec = ex1_game(LQParams{});
  const TimeGrid grid{1.0, 50};
  const ControlField half = [](std::size_t, double, std::span<const double>, std::span<double> a) {
    std::fill(a.begin(), a.end(), 0.5);
  };
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_paths(spec, grid, half, m, {13}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}
BENCHMARK(BM_SimulateEx1)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

void BM_MeanFieldSolve(benchmark::State& state) {
  LQParams p;
  p.kappa1 = 0.5;
  const GameSpec spec = rep_meanfield_game(p);
  MeanFieldConfig cfg;
  cfg.grid = TimeGrid{1.0, 20};
  cfg.particles = 1u << 12;
  for (auto _ : state) benchmark::DoNotOptimize(solve_meanfield(spec, cfg));
}
BENCHMARK(BM_MeanFieldSolve)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace tigames

BENCHMARK_MAIN();
