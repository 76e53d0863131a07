#include <benchmark/benchmark.h>

#include "cylflow/renorm.hpp"

using namespace cylflow;

static void BM_BlockProcess(benchmark::State& state) {
    const Index K = state.range(0);
    const Box domain(Coord{-1, -1}, Coord{1, 1});  // 3x3 blocks
    const Box ambient(Coord{-3 * K, -3 * K}, Coord{3 * K, 3 * K});
    const auto dist = CapacityDistribution::bernoulli(0.9);
    std::uint64_t rep = 0;
    for (auto _ : state) {
        const auto field = sample_capacities(ambient, dist, SeedSpec{21, rep++});
        benchmark::DoNotOptimize(block_process(field, K, domain).x.size());
    }
    state.SetItemsProcessed(state.iterations() * domain.vertex_count());
}
BENCHMARK(BM_BlockProcess)->Arg(4)->Arg(8)->Arg(16);

static void BM_EventU(benchmark::State& state) {
    const Index K = state.range(0);
    BlockLattice lat(2, K);
    const Box box = lat.block_box({0, 0});
    const auto dist = CapacityDistribution::bernoulli(0.9);
    std::uint64_t rep = 0;
    for (auto _ : state) {
        const auto field = sample_capacities(box, dist, SeedSpec{22, rep++});
        benchmark::DoNotOptimize(event_U(field, box));
    }
}
BENCHMARK(BM_EventU)->Arg(8)->Arg(16)->Arg(32);

static void BM_DeltaK(benchmark::State& state) {
    const Index K = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_delta_K(2, K, 0.9, 200, SeedSpec{23, 0}).delta_hat);
    }
    state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_DeltaK)->Arg(8)->Arg(16);
