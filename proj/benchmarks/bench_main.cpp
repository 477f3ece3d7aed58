#include "heatlab/analytic_catalog.hpp"
#include "heatlab/grid_solver.hpp"
#include "heatlab/radial_engine.hpp"
#include "heatlab/random.hpp"
#include "heatlab/spectral.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace heatlab;

static void BM_TruncatedLaplacian(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(1);
    std::vector<SymMatrix> mats;
    for (int i = 0; i < 256; ++i) {
        SymMatrix a(n);
        for (int r = 0; r < n; ++r) {
            for (int c = r; c < n; ++c) a.set(r, c, uniform_in(rng, -1, 1));
        }
        mats.push_back(a);
    }
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(truncated_laplacian(mats[i++ & 255], 1, Sign::plus));
    }
}
BENCHMARK(BM_TruncatedLaplacian)->Arg(2)->Arg(3)->Arg(6);

static void BM_Step(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const auto sol = ClosedFormSolution::shifted_gaussian_plus(2, 1, 1.0);
    const GridField f = GridField::from_solution(sol, 8.0, m, 0.0);
    SchemeConfig cfg;
    cfg.threads = static_cast<int>(state.range(1));
    const double dt = cfg.resolve_dt(f, sol.spec());
    for (auto _ : state) benchmark::DoNotOptimize(step(f, sol.spec(), cfg, dt));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size()));
}
BENCHMARK(BM_Step)->Args({65, 1})->Args({129, 1})->Args({129, 4})->Unit(benchmark::kMicrosecond);

static void BM_HeatConvolve(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const RadialProfile g = profiles::cap(1.0);
    double r = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(heat_convolve_k(g, k, 0.3, r));
        r = r > 2.0 ? 0.0 : r + 0.01;
    }
}
BENCHMARK(BM_HeatConvolve)->Arg(1)->Arg(2)->Arg(3)->Arg(5)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
