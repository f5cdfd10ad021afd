#include <poros/generators.hpp>
#include <poros/metric.hpp>
#include <poros/porosity.hpp>
#include <poros/pretangent.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace poros;

void BM_LinearDifference(benchmark::State& state) {
  const LogValue x = LogValue::pow2(-3);
  const LogValue y = LogValue::from_log2(Rational(-7, 3));
  for (auto _ : state) benchmark::DoNotOptimize(linear_difference(y, x));
}
BENCHMARK(BM_LinearDifference);

void BM_TwoLadder(benchmark::State& state) {
  const auto depth = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gen_example_2_8(depth));
}
BENCHMARK(BM_TwoLadder)->Arg(20)->Arg(40);

void BM_KStar(benchmark::State& state) {
  const ScaleSet set = gen_factorial(40);
  const LogValue t = set.point(20);
  for (auto _ : state) benchmark::DoNotOptimize(K_star(set, t, Rational(3)));
}
BENCHMARK(BM_KStar);

void BM_WPorosity(benchmark::State& state) {
  const ScaleSet set = gen_example_2_8(static_cast<std::size_t>(state.range(0))).set;
  for (auto _ : state) benchmark::DoNotOptimize(w_porosity(set));
}
BENCHMARK(BM_WPorosity)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_TauStrongPorosity(benchmark::State& state) {
  const TwoLadderSet L = gen_example_2_8(40);
  PosSeq tau;
  tau.terms = L.tau_star();
  for (auto _ : state) benchmark::DoNotOptimize(tau_strong_porosity(L.set, tau));
}
BENCHMARK(BM_TauStrongPorosity)->Unit(benchmark::kMillisecond);

void BM_BuildFamily(benchmark::State& state) {
  const HalfLineSpace space(gen_factorial(40));
  const NormalizingSeq r(enumerate_points(gen_factorial(40)));
  const StabilityParams params;
  for (auto _ : state) benchmark::DoNotOptimize(build_family(space, r, params));
}
BENCHMARK(BM_BuildFamily)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
