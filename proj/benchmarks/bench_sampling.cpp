#include <benchmark/benchmark.h>

#include "cylflow/capacity.hpp"

using namespace cylflow;

static void BM_SampleBernoulli(benchmark::State& state) {
    const Index n = state.range(0);
    const Box domain(Coord{0, 0}, Coord{n, n});
    const auto dist = CapacityDistribution::bernoulli(0.7);
    std::uint64_t rep = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_capacities(domain, dist, SeedSpec{31, rep++}).values.size());
    }
    state.SetItemsProcessed(state.iterations() * domain.edge_count());
}
BENCHMARK(BM_SampleBernoulli)->Arg(64)->Arg(256);

static void BM_SampleMixture(benchmark::State& state) {
    const Index n = state.range(0);
    const Box domain(Coord{0, 0}, Coord{n, n});
    const auto dist = CapacityDistribution::mixture({{0.0, 0.3}, {1.0, 0.2}}, ExponentialTail{1.5}, 0.5);
    std::uint64_t rep = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_capacities(domain, dist, SeedSpec{32, rep++}).values.size());
    }
    state.SetItemsProcessed(state.iterations() * domain.edge_count());
}
BENCHMARK(BM_SampleMixture)->Arg(64)->Arg(256);

static void BM_Truncate(benchmark::State& state) {
    const Box domain(Coord{0, 0}, Coord{256, 256});
    const auto dist = CapacityDistribution::mixture({{0.0, 0.3}}, UniformTail{0.0, 2.0}, 0.7);
    const auto field = sample_capacities(domain, dist, SeedSpec{33, 0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(truncate(field, 0.5).values.size());
    }
    state.SetItemsProcessed(state.iterations() * domain.edge_count());
}
BENCHMARK(BM_Truncate);
