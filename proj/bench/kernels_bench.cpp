#include <vector>

#include <benchmark/benchmark.h>

#include "fhs/kernels.hpp"
#include "fhs/random.hpp"

namespace {

std::vector<double> uniform_points(int n) {
  fhs::RandomStream rng(7);
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (double& x : xs) x = rng.uniform();
  return xs;
}

Eigen::MatrixXd normal_draws(int points, int draws) {
  fhs::RandomStream rng(11);
  Eigen::MatrixXd m(points, draws);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.normal();
  return m;
}

template <auto Fn>
void BM_DesignRows(benchmark::State& state) {
  const auto basis = fhs::make_basis(20, 3, 0.0, 1.0);
  const auto xs = uniform_points(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(basis, xs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Fn>
void BM_PointwiseBands(benchmark::State& state) {
  const Eigen::MatrixXd values = normal_draws(static_cast<int>(state.range(0)), 5000);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(values, 0.95));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_DesignRows<fhs::serial::design_rows>)->Arg(1000)->Arg(100000);
BENCHMARK(BM_DesignRows<fhs::kernels::design_rows>)->Arg(1000)->Arg(100000);
BENCHMARK(BM_PointwiseBands<fhs::serial::pointwise_bands>)->Arg(100)->Arg(500);
BENCHMARK(BM_PointwiseBands<fhs::kernels::pointwise_bands>)->Arg(100)->Arg(500);

BENCHMARK_MAIN();
