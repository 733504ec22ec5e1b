#include <benchmark/benchmark.h>

#include "fracmp/experiments.hpp"
#include "fracmp/probes.hpp"

using namespace fracmp;

namespace {

void BM_AssembleOperator(benchmark::State& state) {
  const Grid g = build_grid(-1.0, 1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_operator(g, 0.4));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AssembleOperator)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_GagliardoForm(benchmark::State& state) {
  const Grid g = build_grid(-1.0, 1.0, static_cast<int>(state.range(0)));
  ProbeGenerator gen(g, 1);
  const GridFunction u = gen.smooth();
  for (auto _ : state) benchmark::DoNotOptimize(gagliardo_form(u, u, 0.4));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GagliardoForm)->RangeMultiplier(2)->Range(32, 256)->Complexity();

void BM_MountainPass(benchmark::State& state) {
  const auto op = assemble_operator(build_grid(-1.0, 1.0, static_cast<int>(state.range(0))), 0.4);
  const EnergyContext ctx(op, TruncatedNonlinearity(NonlinearitySpec::canonical(2.0), 0.125), 2000.0);
  MPConfig cfg;
  cfg.geometry_probes = 200;
  const GeometryConstants geo = mp_geometry(ctx, cfg.geometry_probes);
  for (auto _ : state) benchmark::DoNotOptimize(run_mpa(ctx, cfg, geo));
}
BENCHMARK(BM_MountainPass)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_MonotoneIteration(benchmark::State& state) {
  const auto op = assemble_operator(build_grid(-1.0, 1.0, static_cast<int>(state.range(0))), 0.4);
  const NonlinearitySpec f = NonlinearitySpec::canonical(2.0);
  const Reaction reaction = [&f](double t) { return f(t); };
  const double lambda = 2000.0;
  const OrderedPair pair{GridFunction::zeros(op->grid()), GridFunction::constant(op->grid(), 1.0)};
  const MonotoneConfig cfg = default_monotone_config(f, lambda);
  for (auto _ : state) benchmark::DoNotOptimize(monotone_iterate(*op, reaction, lambda, pair, cfg));
}
BENCHMARK(BM_MonotoneIteration)->Arg(32)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
