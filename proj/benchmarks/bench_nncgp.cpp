#include <benchmark/benchmark.h>

#include "nncgp/nngp.hpp"
#include "nncgp/rng.hpp"
#include "nncgp/sampler.hpp"

using namespace nncgp;

namespace {

Matrix random_points(int n, int d, std::uint64_t seed) {
  RngStream rng(seed, 61);
  Matrix pts(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) pts(i, j) = rng.uniform();
  return pts;
}

void BM_neighbor_graph(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  const Matrix locs = random_points(n, 2, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(build_neighbor_graph(locs, m));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_neighbor_graph)->Args({1000, 10})->Args({5000, 10})
    ->Args({5000, 20})->Unit(benchmark::kMillisecond);

void BM_compute_factors(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  const Matrix locs = random_points(n, 2, 2);
  const auto graph = build_neighbor_graph(locs, m);
  KernelParams kernel{2.0, Vector::Constant(2, 0.1)};
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_factors(graph, locs, kernel));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_compute_factors)->Args({1000, 10})->Args({5000, 10})
    ->Args({5000, 20})->Unit(benchmark::kMillisecond);

void BM_log_density(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix locs = random_points(n, 2, 3);
  const auto graph = build_neighbor_graph(locs, 10);
  KernelParams kernel{2.0, Vector::Constant(2, 0.1)};
  const auto factors = compute_factors(graph, locs, kernel);
  RngStream rng(4, 0);
  Vector w(n);
  for (int i = 0; i < n; ++i) w[i] = rng.normal();
  for (auto _ : state)
    benchmark::DoNotOptimize(nngp_log_density(w, factors, graph));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_log_density)->Arg(1000)->Arg(10000)
    ->Unit(benchmark::kMicrosecond);

void BM_sampler_iteration(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  FidelityDataset d1, d2;
  d1.level = 1;
  d1.locations = random_points(n, 2, 5);
  d2.level = 2;
  d2.locations = random_points(n, 2, 6);
  RngStream rng(7, 0);
  d1.values.resize(n);
  d2.values.resize(n);
  for (int i = 0; i < n; ++i) {
    d1.values[i] = rng.normal(10.0, 2.0);
    d2.values[i] = rng.normal(11.0, 2.2);
  }
  auto ws = build_workspace({d1, d2}, 10,
                            BasisConfig::uniform(2, BasisKind::kConstant,
                                                 BasisKind::kConstant));
  Priors priors(2);
  for (int t = 0; t < 2; ++t) {
    priors[t].beta_mean = Vector::Zero(1);
    priors[t].beta_var = Vector::Constant(1, 1e4);
    priors[t].phi_upper = Vector::Constant(2, 100.0);
  }
  priors[1].gamma_mean = Vector::Zero(1);
  priors[1].gamma_var = Vector::Constant(1, 1e4);
  SamplerConfig cfg;
  cfg.n_iter = 10;
  cfg.burn_in = 1;
  GibbsSampler gs(ws, priors, cfg);
  int iter = 0;
  for (auto _ : state) gs.iterate(iter++);
  state.SetItemsProcessed(state.iterations() * 2 * n);
}
BENCHMARK(BM_sampler_iteration)->Arg(250)->Arg(500)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
