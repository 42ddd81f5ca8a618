#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "socon/points.hpp"

namespace {

void BM_MakeContext(benchmark::State& state) {
  const auto img = socon_bench::rendered_image(7);
  for (auto _ : state) {
    auto ctx = socon::make_context(img, 4, 4);
    benchmark::DoNotOptimize(ctx.values.data());
  }
}
BENCHMARK(BM_MakeContext);

void BM_MakePolarKey(benchmark::State& state) {
  const auto ctx = socon::make_context(socon_bench::rendered_image(7), 4, 4);
  for (auto _ : state) {
    auto key = socon::make_polar_key(ctx);
    benchmark::DoNotOptimize(key.values.data());
  }
}
BENCHMARK(BM_MakePolarKey);

void BM_MedianFilter(benchmark::State& state) {
  const auto img = socon_bench::rendered_image(7);
  const int kernel = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto filtered = socon::median_filter(img, kernel);
    benchmark::DoNotOptimize(filtered.pixels.data());
  }
}
BENCHMARK(BM_MedianFilter)->Arg(3)->Arg(5);

void BM_MakeFrame(benchmark::State& state) {
  const auto img = socon_bench::rendered_image(7);
  socon::FrameConfig cfg;
  for (auto _ : state) {
    auto frame = socon::make_frame(img, cfg, 0, 0.0, socon::SE2{});
    benchmark::DoNotOptimize(frame.cloud.points.data());
  }
}
BENCHMARK(BM_MakeFrame);

}  // namespace
