#include <benchmark/benchmark.h>

#include <cmath>

#include "bibt/graph_complex.hpp"
#include "bibt/rng.hpp"
#include "bibt/sampler.hpp"

namespace {

bibt::ComparisonData synthetic_data(int n, int trials, std::uint64_t seed) {
  const bibt::ComplexIndex idx = bibt::build_complex(n);
  bibt::Rng rng(seed);
  bibt::ComparisonData data;
  data.n_entities = n;
  data.wins.resize(idx.n_edges());
  data.trials.resize(idx.n_edges());
  for (int e = 0; e < idx.n_edges(); ++e) {
    data.trials[e] = trials;
    const double p = 1.0 / (1.0 + std::exp(-rng.normal()));
    data.wins[e] = static_cast<int>(rng.binomial(trials, p));
  }
  return data;
}

void BM_GibbsSweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int trials = static_cast<int>(state.range(1));
  const bibt::ComplexIndex idx = bibt::build_complex(n);
  const bibt::OperatorSet ops = bibt::build_curl_basis(idx, 1e-10, false);
  const bibt::ComparisonData data = synthetic_data(n, trials, 3);
  const bibt::Hyperparams hp;
  bibt::Rng rng(4);
  bibt::SamplerState st = bibt::SamplerState::initial(data, ops);
  for (auto _ : state) {
    bibt::gibbs_update_omega(st, data, ops, rng);
    bibt::gibbs_update_scores(st, data, ops, rng);
    bibt::gibbs_update_score_variance(st, hp, rng);
    bibt::gibbs_update_curl_weights(st, data, ops, rng);
    bibt::gibbs_update_shrinkage(st, rng);
  }
}
BENCHMARK(BM_GibbsSweep)
    ->Args({10, 100})
    ->Args({20, 100})
    ->Args({30, 30})
    ->Unit(benchmark::kMicrosecond);

}  // namespace
