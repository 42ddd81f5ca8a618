#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "socon/matching.hpp"

namespace {

void BM_AdaptiveMatch(benchmark::State& state) {
  const auto iq = socon::make_context(socon_bench::rendered_image(11), 4, 4);
  const auto ic = socon::make_context(socon_bench::rendered_image(12), 4, 4);
  socon::MatchConfig cfg;
  cfg.mu = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) {
    auto r = socon::adaptive_match(iq, ic, cfg);
    benchmark::DoNotOptimize(r.distance);
  }
}
BENCHMARK(BM_AdaptiveMatch)->Arg(20)->Arg(50)->Arg(70);

void BM_ColumnDistance(benchmark::State& state) {
  const auto iq = socon::make_context(socon_bench::rendered_image(11), 4, 4);
  const auto ic = socon::make_context(socon_bench::rendered_image(12), 4, 4);
  for (auto _ : state) {
    auto d = socon::column_distance(iq, ic, 0.5);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_ColumnDistance);

}  // namespace
