#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "xfemp/diagnostics.hpp"

namespace {

using namespace xfemp;

void BM_BuildTB(benchmark::State& state) {
  const auto disc = bench::circle_disc(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_TB(disc.mesh, disc.partitions, disc.table));
}
BENCHMARK(BM_BuildTB)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_ReducedSystem(benchmark::State& state) {
  const auto disc = bench::circle_disc(40);
  const auto sys = assemble(disc, bench::two_phase(), bench::left_right_dirichlet(), StabilizedLagrange{2002.0});
  const auto P = build_preconditioner(disc, sys, {PrecondKind::TB, 1e8});
  for (auto _ : state) benchmark::DoNotOptimize(reduced_system(sys, P));
}
BENCHMARK(BM_ReducedSystem)->Unit(benchmark::kMillisecond);

void BM_ConditionNumber(benchmark::State& state) {
  const auto disc = bench::circle_disc(static_cast<int>(state.range(0)));
  const auto sys = assemble(disc, bench::two_phase(), bench::left_right_dirichlet(), StabilizedLagrange{2002.0});
  const auto J = reduced_system(sys, build_preconditioner(disc, sys, {PrecondKind::TB, 1e8})).J;
  for (auto _ : state) benchmark::DoNotOptimize(condition_number(J));
  state.SetLabel(J.rows() <= 400 ? "dense" : "lanczos");
}
BENCHMARK(BM_ConditionNumber)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace
