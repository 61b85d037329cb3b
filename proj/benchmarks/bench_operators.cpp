#include <benchmark/benchmark.h>

#include "bibt/graph_complex.hpp"
#include "bibt/rng.hpp"

namespace {

void BM_BuildCurlBasis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const bibt::ComplexIndex idx = bibt::build_complex(n);
  for (auto _ : state) {
    auto ops = bibt::build_curl_basis(idx, 1e-10, /*with_kernel_basis=*/false);
    benchmark::DoNotOptimize(ops.curl_basis);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_BuildCurlBasis)->Arg(10)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_HodgeProject(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const bibt::ComplexIndex idx = bibt::build_complex(n);
  const bibt::OperatorSet ops = bibt::build_curl_basis(idx, 1e-10, false);
  bibt::Rng rng(1);
  Eigen::VectorXd m(idx.n_edges());
  for (int e = 0; e < m.size(); ++e) m[e] = rng.normal();
  const bibt::EdgeFlow flow(m);
  for (auto _ : state) {
    auto parts = bibt::hodge_project(flow, ops);
    benchmark::DoNotOptimize(parts.residual_norm);
  }
}
BENCHMARK(BM_HodgeProject)->Arg(10)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace
