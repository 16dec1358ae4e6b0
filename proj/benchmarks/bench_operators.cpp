// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "photherm/boundary_potentials.hpp"
#include "photherm/em_scattering.hpp"
#include "photherm/geometry.hpp"
#include "photherm/volume_potentials.hpp"

using namespace photherm;

static void BM_AssembleSingleLayer(benchmark::State& state) {
  const Curve disk = make_curve({CurveKind::Circle, 2.0, 0.0},
                                static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_single_layer(disk));
}
BENCHMARK(BM_AssembleSingleLayer)->Arg(128)->Arg(256)->Arg(512);

static void BM_NewtonianGrid(benchmark::State& state) {
  const Curve disk = make_curve({CurveKind::Circle, 2.0, 0.0}, 64);
  const VolumeGrid grid = make_grid(disk, 4.0 / state.range(0));
  const SourceField f = make_source_field(grid, [](const Vec2&) { return 1.0; });
  for (auto _ : state)
    benchmark::DoNotOptimize(newtonian_on_grid(grid, f.samples));
}
BENCHMARK(BM_NewtonianGrid)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

static void BM_LippmannSchwinger(benchmark::State& state) {
  const Curve disk = make_curve({CurveKind::Circle, 2.0, 0.0}, 64);
  const VolumeGrid grid = make_grid(disk, 0.1);
  const SourceField f = make_source_field(grid, [](const Vec2&) { return 1.0; });
  const DrudeParams drude;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        solve_lippmann_schwinger(grid, f, 1e-3, drude));
}
BENCHMARK(BM_LippmannSchwinger)->Unit(benchmark::kMillisecond);
