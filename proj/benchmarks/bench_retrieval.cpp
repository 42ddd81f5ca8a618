#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "socon/retrieval.hpp"

namespace {

socon::PolarKey random_key(socon::Rng& rng, int dim) {
  socon::PolarKey key;
  key.values.resize(dim);
  for (int i = 0; i < dim; ++i) key.values[i] = rng.uniform01();
  return key;
}

void BM_KeyIndexInsert(benchmark::State& state) {
  socon::Rng rng(3);
  for (auto _ : state) {
    socon::KeyIndex index;
    for (int i = 0; i < state.range(0); ++i) index.insert(i, random_key(rng, 125));
    benchmark::DoNotOptimize(index.size());
  }
}
BENCHMARK(BM_KeyIndexInsert)->Arg(100)->Arg(400);

void BM_KeyIndexQuery(benchmark::State& state) {
  socon::Rng rng(3);
  socon::KeyIndex index;
  const auto n = state.range(0);
  for (int i = 0; i < n; ++i) index.insert(i, random_key(rng, 125));
  const auto q = random_key(rng, 125);
  socon::RetrievalConfig cfg;
  for (auto _ : state) {
    auto cands = index.query(n, q, cfg);
    benchmark::DoNotOptimize(cands.data());
  }
}
BENCHMARK(BM_KeyIndexQuery)->Arg(400)->Arg(2000);

}  // namespace
