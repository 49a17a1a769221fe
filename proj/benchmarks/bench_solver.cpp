#include <benchmark/benchmark.h>

#include "bench_common.hpp"

namespace {

using namespace xfemp;

void BM_SolveLinear(benchmark::State& state) {
  const auto disc = bench::circle_disc(40, 5.0);
  const auto sys = assemble(disc, bench::two_phase(), bench::left_right_dirichlet(), StabilizedLagrange{2002.0});
  const auto P = build_preconditioner(disc, sys, {PrecondKind::TB, 1e8});
  SolverConfig cfg;
  const auto variant = state.range(0);
  if (variant > 0) {
    cfg.method = SolveMethod::GMRES;
    cfg.solver_precond = variant == 1 ? SolverPrecond::Jacobi : SolverPrecond::ILU0;
  }
  int iterations = 0;
  for (auto _ : state) {
    const auto out = solve_linear(sys, P, cfg);
    iterations = out.iterations;
    benchmark::DoNotOptimize(out.u_hat.data());
  }
  state.counters["iterations"] = iterations;
  state.SetLabel(variant == 0 ? "direct" : variant == 1 ? "gmres+jacobi" : "gmres+ilu0");
}
BENCHMARK(BM_SolveLinear)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace
