// Microbenchmarks for the hot paths: neighborhood sampling, the two local
// maximum checks, the per-sample cost of both estimators, the torus weight,
// the floating-point chain recursion, and the Bessel evaluations.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "nk/estimate.hpp"
#include "nk/fattail.hpp"
#include "nk/k1exact.hpp"
#include "nk/model.hpp"
#include "nk/rng.hpp"

namespace {

constexpr std::uint64_t kSeed = 1;

nk::ModelParams params_for(const benchmark::State& state) {
    return {static_cast<int>(state.range(0)),
            static_cast<int>(state.range(1)),
            nk::DistributionKind::uniform01};
}

void bm_sample_neighborhood(benchmark::State& state) {
    const auto params = params_for(state);
    nk::NeighborhoodSample sample;
    std::vector<double> scratch;
    nk::StreamRng rng(kSeed, 0);
    for (auto _ : state) {
        nk::sample_neighborhood_into(sample, scratch, params, rng);
        benchmark::DoNotOptimize(sample.y.data());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_sample_neighborhood)
    ->Args({12, 3})
    ->Args({100, 10})
    ->Args({503, 200});

void bm_check_direct(benchmark::State& state) {
    const auto params = params_for(state);
    const auto sample = nk::sample_neighborhood(params, kSeed);
    for (auto _ : state)
        benchmark::DoNotOptimize(nk::check_direct(sample));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_check_direct)->Args({12, 3})->Args({100, 10})->Args({503, 200});

void bm_run_cover_algorithm(benchmark::State& state) {
    const auto params = params_for(state);
    const auto sample = nk::sample_neighborhood(params, kSeed);
    for (auto _ : state)
        benchmark::DoNotOptimize(nk::run_cover_algorithm(sample).verdict);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_run_cover_algorithm)
    ->Args({12, 3})
    ->Args({100, 10})
    ->Args({503, 200});

void bm_direct_mc_per_sample(benchmark::State& state) {
    const auto params = params_for(state);
    constexpr std::uint64_t kBatch = 4096;
    std::uint64_t seed = kSeed;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            nk::direct_mc(params, kBatch, ++seed).p_hat);
    state.SetItemsProcessed(state.iterations() * kBatch);
}
BENCHMARK(bm_direct_mc_per_sample)->Args({12, 3})->Args({64, 16});

void bm_conditional_mc_per_sample(benchmark::State& state) {
    const auto params = params_for(state);
    constexpr std::uint64_t kBatch = 1024;
    std::uint64_t seed = kSeed;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            nk::conditional_mc(params, kBatch, ++seed).p_hat);
    state.SetItemsProcessed(state.iterations() * kBatch);
}
BENCHMARK(bm_conditional_mc_per_sample)->Args({12, 3})->Args({64, 16});

void bm_eta_weight(benchmark::State& state) {
    const int r = static_cast<int>(state.range(0));
    nk::StreamRng rng(kSeed, 0);
    std::vector<double> x(static_cast<std::size_t>(r));
    x[0] = 0.0;
    for (int i = 1; i < r; ++i) x[static_cast<std::size_t>(i)] =
        rng.next_uniform();
    for (auto _ : state)
        benchmark::DoNotOptimize(nk::eta_weight(x, 0.5));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_eta_weight)->Arg(3)->Arg(4)->Arg(8);

void bm_recursion_float(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(nk::recursion_float(n).log_values.back());
}
BENCHMARK(bm_recursion_float)->Arg(500)->Arg(2000)->Arg(10000);

void bm_bessel(benchmark::State& state) {
    const nk::Rational nu(2, 3);
    double x = 1.0;
    for (auto _ : state) {
        x = x >= 9.0 ? 1.0 : x + 0.1;
        benchmark::DoNotOptimize(
            nk::bessel_modified(nk::BesselKind::K, nu, x));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_bessel);

void bm_series_denominator(benchmark::State& state) {
    double z = 1.1;
    for (auto _ : state) {
        z = z >= 2.8 ? 1.1 : z + 0.01;
        benchmark::DoNotOptimize(nk::series_denominator(z));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_series_denominator);

} // namespace

BENCHMARK_MAIN();
