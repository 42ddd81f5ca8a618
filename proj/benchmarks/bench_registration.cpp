#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "socon/registration.hpp"

namespace {

socon::PointCloud2D random_cloud(std::uint64_t seed, int n) {
  socon::Rng rng(seed);
  socon::PointCloud2D cloud;
  cloud.points.reserve(n);
  for (int i = 0; i < n; ++i)
    cloud.points.push_back({rng.uniform(5.0, 45.0), rng.uniform(-20.0, 20.0), 1.0});
  return cloud;
}

void BM_Icp2d(benchmark::State& state) {
  const auto src = random_cloud(5, static_cast<int>(state.range(0)));
  socon::PointCloud2D dst;
  const socon::SE2 truth(0.8, -0.3, 0.15);
  for (const auto& p : src.points) {
    double x, y;
    truth.apply(p.x_m, p.y_m, x, y);
    dst.points.push_back({x, y, p.intensity});
  }
  socon::IcpConfig cfg;
  for (auto _ : state) {
    auto r = socon::icp_2d(src, dst, socon::SE2{}, cfg);
    benchmark::DoNotOptimize(r.rms_m);
  }
}
BENCHMARK(BM_Icp2d)->Arg(256)->Arg(1024);

}  // namespace
