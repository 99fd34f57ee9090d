#include "ptmap/ptmap.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_SinkhornBalanced(benchmark::State& state) {
  const auto rows = state.range(0);
  const auto cols = state.range(1);
  ptmap::Rng rng(1);
  ptmap::Matrix cost(rows, cols);
  for (Eigen::Index i = 0; i < cost.size(); ++i) cost.data()[i] = 4.0 * rng.uniform();
  const ptmap::Marginals marg = ptmap::Marginals::balanced(rows, cols);
  ptmap::SinkhornConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ptmap::sinkhorn(cost, marg, cfg));
  }
}
BENCHMARK(BM_SinkhornBalanced)->Args({75, 5})->Args({80, 5})->Args({300, 20});

void BM_SinkhornLogDomain(benchmark::State& state) {
  ptmap::Rng rng(2);
  ptmap::Matrix cost(75, 5);
  for (Eigen::Index i = 0; i < cost.size(); ++i) cost.data()[i] = 4.0 * rng.uniform();
  const ptmap::Marginals marg = ptmap::Marginals::balanced(75, 5);
  ptmap::SinkhornConfig cfg;
  cfg.log_domain = true;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ptmap::sinkhorn(cost, marg, cfg));
  }
}
BENCHMARK(BM_SinkhornLogDomain);

}  // namespace
