#include <benchmark/benchmark.h>

#include "greenberg/filtration.hpp"
#include "greenberg/pgroup.hpp"
#include "greenberg/rng.hpp"
#include "greenberg/stochastic.hpp"

using namespace greenberg;

static void BM_SmithNormalForm(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SplitMix64 rng(17);
    // Small entries: elimination intermediates grow fast and the checked
    // arithmetic would throw on overflow otherwise.
    Matrix a(n, std::vector<i64>(n));
    for (auto& row : a)
        for (auto& x : row) x = static_cast<i64>(rng.below(7)) - 3;
    for (auto _ : state) {
        auto d = smith_decompose(a);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(BM_SmithNormalForm)->Arg(4)->Arg(6)->Arg(8);

static void BM_FiltrationTrace(benchmark::State& state) {
    const AbelianPGroup g(3, {3, 1});
    const GModule m(g, PHom(g, g, {{1, 9}, {0, 1}}), 1);
    for (auto _ : state) {
        auto trace = filtration_trace(m);
        benchmark::DoNotOptimize(trace);
    }
}
BENCHMARK(BM_FiltrationTrace);

static void BM_MonteCarlo(benchmark::State& state) {
    SimModel model;
    model.p = 3;
    model.class_part = AbelianPGroup(3, {1, 1});
    model.norm_part = AbelianPGroup(3, {2});
    for (auto _ : state) {
        auto dist = monte_carlo(model, state.range(0), 7);
        benchmark::DoNotOptimize(dist);
    }
}
BENCHMARK(BM_MonteCarlo)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
