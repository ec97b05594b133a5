// Parallel apply kernel against the serial loop-nest reference.

#include "meshcrit/hamiltonian.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace meshcrit;

namespace {

MeshSpec mesh_for(const benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const int nz = static_cast<int>(state.range(1));
    return {n, n, nz, 0.8, 0.8, 0.5};
}

std::vector<double> random_input(std::size_t n)
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (auto& x : v)
        x = d(rng);
    return v;
}

void BM_apply(benchmark::State& state)
{
    const auto h = build_hamiltonian(mesh_for(state), 1.0);
    const auto v = random_input(h.dim());
    std::vector<double> out(h.dim());
    for (auto _ : state) {
        h.apply(v, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(h.dim()));
}

void BM_apply_serial(benchmark::State& state)
{
    const auto h = build_hamiltonian(mesh_for(state), 1.0);
    const auto v = random_input(h.dim());
    std::vector<double> out(h.dim());
    for (auto _ : state) {
        h.apply_serial(v, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(h.dim()));
}

void mesh_sizes(benchmark::internal::Benchmark* b)
{
    b->Args({20, 20})->Args({40, 30})->Args({50, 40})->Args({70, 20})->Unit(benchmark::kMillisecond);
}

} // namespace

BENCHMARK(BM_apply)->Apply(mesh_sizes)->UseRealTime();
BENCHMARK(BM_apply_serial)->Apply(mesh_sizes)->UseRealTime();

BENCHMARK_MAIN();
