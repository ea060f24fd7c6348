// Serial reference vs OpenMP kernels on the elementwise ADMM steps.

#include "tl1mc/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>

using tl1mc::DenseMatrix;
namespace k = tl1mc::kernels;

namespace {

struct Fixture {
    DenseMatrix mask, filled, z, w, out;

    explicit Fixture(long m)
    {
        std::mt19937_64 rng(1);
        std::normal_distribution<double> n(0.0, 1.0);
        std::bernoulli_distribution keep(0.2);
        mask.resize(m, m);
        filled.resize(m, m);
        z.resize(m, m);
        w.resize(m, m);
        for (long i = 0; i < mask.size(); ++i) {
            mask.data()[i] = keep(rng) ? 1.0 : 0.0;
            filled.data()[i] = mask.data()[i] * n(rng);
            z.data()[i] = n(rng);
            w.data()[i] = n(rng);
        }
    }
};

template <bool Parallel>
void BM_AUpdate(benchmark::State& state)
{
    Fixture f(state.range(0));
    for (auto _ : state) {
        if constexpr (Parallel) {
            k::omp::a_update(f.mask, f.filled, f.z, f.w, 1e-4, 5e-5, 3.0, f.out);
        } else {
            k::serial::a_update(f.mask, f.filled, f.z, f.w, 1e-4, 5e-5, 3.0, f.out);
        }
        benchmark::DoNotOptimize(f.out.data());
    }
    state.SetItemsProcessed(state.iterations() * f.z.size());
}

template <bool Parallel>
void BM_DualAscent(benchmark::State& state)
{
    Fixture f(state.range(0));
    for (auto _ : state) {
        if constexpr (Parallel) {
            k::omp::dual_ascent(f.w, f.z, f.filled, 1e-6);
        } else {
            k::serial::dual_ascent(f.w, f.z, f.filled, 1e-6);
        }
        benchmark::DoNotOptimize(f.w.data());
    }
    state.SetItemsProcessed(state.iterations() * f.z.size());
}

template <bool Parallel>
void BM_Frobenius(benchmark::State& state)
{
    Fixture f(state.range(0));
    for (auto _ : state) {
        double d = Parallel ? k::omp::frobenius_distance(f.z, f.w) : k::serial::frobenius_distance(f.z, f.w);
        benchmark::DoNotOptimize(d);
    }
    state.SetItemsProcessed(state.iterations() * f.z.size());
}

} // namespace

BENCHMARK(BM_AUpdate<false>)->Arg(300)->Arg(1000);
BENCHMARK(BM_AUpdate<true>)->Arg(300)->Arg(1000);
BENCHMARK(BM_DualAscent<false>)->Arg(300)->Arg(1000);
BENCHMARK(BM_DualAscent<true>)->Arg(300)->Arg(1000);
BENCHMARK(BM_Frobenius<false>)->Arg(300)->Arg(1000);
BENCHMARK(BM_Frobenius<true>)->Arg(300)->Arg(1000);

BENCHMARK_MAIN();
