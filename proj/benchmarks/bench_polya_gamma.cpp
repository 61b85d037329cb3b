#include <benchmark/benchmark.h>

#include "bibt/polya_gamma.hpp"
#include "bibt/rng.hpp"

namespace {

void BM_PgDraw(benchmark::State& state) {
  const long b = state.range(0);
  const double c = static_cast<double>(state.range(1)) / 10.0;
  bibt::Rng rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bibt::pg_draw({b, c}, rng));
  }
  state.SetItemsProcessed(state.iterations() * b);
}
BENCHMARK(BM_PgDraw)
    ->Args({1, 0})
    ->Args({1, 20})
    ->Args({100, 0})
    ->Args({100, 20})
    ->Args({1000, 10});

}  // namespace
