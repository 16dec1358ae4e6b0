// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "photherm/kernels.hpp"

using namespace photherm;

static void BM_Hankel0Series(benchmark::State& state) {
  double x = 0.11;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hankel1_0(x));
    x = x < 7.9 ? x + 1e-4 : 0.11;
  }
}
BENCHMARK(BM_Hankel0Series);

static void BM_Hankel0Asymptotic(benchmark::State& state) {
  double x = 9.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hankel1_0(x));
    x = x < 200.0 ? x + 1e-3 : 9.0;
  }
}
BENCHMARK(BM_Hankel0Asymptotic);

static void BM_GreenLowFreqExpansion(benchmark::State& state) {
  const ExpansionConstants ec = ExpansionConstants::make(2);
  double r = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(green_low_freq_expansion(r, 1e-2, ec));
    r = r < 3.0 ? r + 1e-4 : 0.5;
  }
}
BENCHMARK(BM_GreenLowFreqExpansion);

static void BM_DrudeEps(benchmark::State& state) {
  const DrudeParams p{1.0, 1.0};
  double w = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(drude_eps(p, w));
    w = w < 0.1 ? w * 1.0001 : 1e-3;
  }
}
BENCHMARK(BM_DrudeEps);

BENCHMARK_MAIN();
