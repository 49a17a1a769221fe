#include <benchmark/benchmark.h>

#include "bench_common.hpp"

namespace {

using namespace xfemp;

void BM_Discretize(benchmark::State& state) {
  const auto mesh = build_structured_mesh(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)),
                                          Rect{-10.0, 10.0, -10.0, 10.0});
  for (auto _ : state) benchmark::DoNotOptimize(discretize(mesh, Circle{Vec2::Zero(), 4.37}));
}
BENCHMARK(BM_Discretize)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
  const auto disc = bench::circle_disc(static_cast<int>(state.range(0)));
  const auto bc = bench::left_right_dirichlet();
  const ConstraintMethod method =
      state.range(1) == 0 ? ConstraintMethod{StabilizedLagrange{2002.0}} : ConstraintMethod{Nitsche{2.002}};
  for (auto _ : state) benchmark::DoNotOptimize(assemble(disc, bench::two_phase(), bc, method));
  state.SetLabel(method_name(method));
}
BENCHMARK(BM_Assemble)->ArgsProduct({{20, 40, 80}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace
