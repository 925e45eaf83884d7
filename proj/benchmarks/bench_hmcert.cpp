#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

#include "hmcert/certifier.hpp"
#include "hmcert/harmonic.hpp"
#include "hmcert/t_operator.hpp"

using namespace hmcert;

namespace {

CurveSpec curve_for(int which) {
  switch (which) {
    case 0: return CurveSpec::circle();
    case 1: return CurveSpec::ellipse(2, 1);
    case 2: return CurveSpec::polar_cosine(0.3, 3);
    default: return CurveSpec::polar_cosine(0.45, 11);
  }
}

BoundaryMap map_for(int which) {
  const JordanCurve g = build_curve(curve_for(which));
  return BoundaryMap(g, build_param(MapSpec::sin_perturbed(0.2, 3), g.length()));
}

}  // namespace

// Arc-length table and turning angle; the lobed curve needs the largest table.
static void BM_BuildCurve(benchmark::State& state) {
  const CurveSpec spec = curve_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_curve(spec));
  state.SetLabel(spec.id());
}
BENCHMARK(BM_BuildCurve)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

static void BM_TSingular(benchmark::State& state) {
  const BoundaryMap m = map_for(static_cast<int>(state.range(0)));
  double tau = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(t_singular(m, tau, 1e-7));
    tau += 0.37;
  }
  state.SetLabel(m.curve().source().id());
}
BENCHMARK(BM_TSingular)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

static void BM_TCotangent(benchmark::State& state) {
  const BoundaryMap m = map_for(static_cast<int>(state.range(0)));
  double tau = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(t_cotangent(m, tau, 1e-7));
    tau += 0.37;
  }
  state.SetLabel(m.curve().source().id());
}
BENCHMARK(BM_TCotangent)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

static void BM_TProfile(benchmark::State& state) {
  const BoundaryMap m = map_for(1);
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(t_profile(m, grid, 1e-7));
  state.SetComplexityN(grid);
}
BENCHMARK(BM_TProfile)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_HarmonicExtension(benchmark::State& state) {
  const BoundaryMap m = map_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(harmonic_extension(m));
  state.SetLabel(m.curve().source().id());
}
BENCHMARK(BM_HarmonicExtension)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

static void BM_Oracle(benchmark::State& state) {
  const HarmonicMap hm = harmonic_extension(map_for(2));
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(univalence_oracle(hm, n, 4 * n));
}
BENCHMARK(BM_Oracle)->Arg(24)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_Certify(benchmark::State& state) {
  const JordanCurve g = build_curve(CurveSpec::ellipse(2, 1));
  const WeakHomeomorphism f = build_param(MapSpec::identity(), g.length());
  for (auto _ : state) benchmark::DoNotOptimize(certify(g, f, 256));
}
BENCHMARK(BM_Certify)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
