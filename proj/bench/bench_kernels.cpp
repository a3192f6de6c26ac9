// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <numbers>

#include "blochcav/capacitance.hpp"
#include "blochcav/oracle.hpp"

namespace {

using namespace blochcav;

void BM_AssembleSerial(benchmark::State& state) {
  const auto mesh = make_sphere_mesh(1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::assemble_single_layer(mesh));
  state.counters["triangles"] = static_cast<double>(mesh.size());
}

void BM_AssembleParallel(benchmark::State& state) {
  const auto mesh = make_sphere_mesh(1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_single_layer(mesh));
  state.counters["triangles"] = static_cast<double>(mesh.size());
}

LatticeSumContext bench_context() {
  return make_lattice_sum_context(make_cubic_lattice(2 * std::numbers::pi), Vec3(0.13, 0.21, 0.34));
}

void BM_EwaldSerial(benchmark::State& state) {
  const auto ctx = bench_context();
  for (auto _ : state) benchmark::DoNotOptimize(serial::ewald_green(ctx, 0.01));
}

void BM_EwaldParallel(benchmark::State& state) {
  const auto ctx = bench_context();
  for (auto _ : state) benchmark::DoNotOptimize(ewald_green(ctx, 0.01));
}

}  // namespace

BENCHMARK(BM_AssembleSerial)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleParallel)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EwaldSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EwaldParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
