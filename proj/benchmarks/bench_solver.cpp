#include <benchmark/benchmark.h>

#include <random>

#include "funcreg/kernel.hpp"
#include "funcreg/rkhs.hpp"
#include "funcreg/sim.hpp"

using namespace funcreg;

namespace {

CurveSet brownian_set(int n, const Grid& grid, std::uint64_t seed) {
    Eigen::MatrixXd values(n, grid.size());
    for (int i = 0; i < n; ++i) {
        auto rng = substream(seed, 0, DataRole::train, i);
        values.row(i) = gen_brownian(rng, grid).values().transpose();
    }
    return CurveSet(grid, std::move(values));
}

void bench_fit(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int T = static_cast<int>(state.range(1));
    const Grid grid = Grid::equispaced(T);
    const CurveSet xs = brownian_set(n, grid, 1);
    const CurveSet ys = brownian_set(n, grid, 2);
    const double sigma = default_sigma(xs);
    const double sigma_prime = default_sigma_prime(grid);
    for (auto _ : state)
        benchmark::DoNotOptimize(fit(xs, ys, sigma, sigma_prime, 0.5));
}

void bench_solver_reuse(benchmark::State& state) {
    // One eigendecomposition, 25 lambda solves: the GCV-scan hot path.
    const int n = static_cast<int>(state.range(0));
    const int T = static_cast<int>(state.range(1));
    const Grid grid = Grid::equispaced(T);
    const CurveSet xs = brownian_set(n, grid, 3);
    const CurveSet ys = brownian_set(n, grid, 4);
    const double sigma = default_sigma(xs);
    const double sigma_prime = default_sigma_prime(grid);
    const auto lambdas = log_lambda_grid();
    for (auto _ : state) {
        RkhsSolver solver(xs, ys, sigma, sigma_prime);
        double total = 0.0;
        for (double lambda : lambdas) total += solver.gcv_score(lambda);
        benchmark::DoNotOptimize(total);
    }
}

void bench_influence_dense(benchmark::State& state) {
    // Dense Kronecker route, for scale comparison with the eigen solver.
    const int n = static_cast<int>(state.range(0));
    const int T = static_cast<int>(state.range(1));
    const Grid grid = Grid::equispaced(T);
    const CurveSet xs = brownian_set(n, grid, 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            influence_matrix(xs, default_sigma(xs), default_sigma_prime(grid), 0.5));
}

} // namespace

BENCHMARK(bench_fit)->Args({30, 50})->Args({60, 50})->Args({30, 100});
BENCHMARK(bench_solver_reuse)->Args({30, 50})->Args({60, 50});
BENCHMARK(bench_influence_dense)->Args({10, 20})->Args({30, 50});

BENCHMARK_MAIN();
