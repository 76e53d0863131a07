#include <benchmark/benchmark.h>

#include "cylflow/flow.hpp"

using namespace cylflow;

namespace {

LatticeGraph square_cylinder(Index n) {
    CylinderSpec spec;
    spec.d = 2;
    spec.sides = {n};
    spec.height = n;
    return build_cylinder(spec);
}

}  // namespace

static void BM_MaxFlowBernoulli(benchmark::State& state) {
    const Index n = state.range(0);
    const LatticeGraph g = square_cylinder(n);
    const auto dist = CapacityDistribution::bernoulli(0.9);
    std::uint64_t rep = 0;
    for (auto _ : state) {
        const auto field = sample_capacities(g, dist, SeedSpec{11, rep++});
        benchmark::DoNotOptimize(max_flow(g, field).value);
    }
    state.SetItemsProcessed(state.iterations() * g.edge_count());
}
BENCHMARK(BM_MaxFlowBernoulli)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

static void BM_MaxFlowUniform(benchmark::State& state) {
    const Index n = state.range(0);
    const LatticeGraph g = square_cylinder(n);
    const auto dist = CapacityDistribution::mixture({}, UniformTail{0.0, 1.0}, 1.0);
    std::uint64_t rep = 0;
    for (auto _ : state) {
        const auto field = sample_capacities(g, dist, SeedSpec{12, rep++});
        benchmark::DoNotOptimize(max_flow(g, field).value);
    }
    state.SetItemsProcessed(state.iterations() * g.edge_count());
}
BENCHMARK(BM_MaxFlowUniform)->Arg(8)->Arg(16)->Arg(32);

static void BM_DisjointPaths3d(benchmark::State& state) {
    const Index n = state.range(0);
    CylinderSpec spec;
    spec.d = 3;
    spec.sides = {n, n};
    spec.height = n;
    const LatticeGraph g = build_cylinder(spec);
    const auto dist = CapacityDistribution::bernoulli(0.8);
    std::uint64_t rep = 0;
    for (auto _ : state) {
        const auto field = sample_capacities(g, dist, SeedSpec{13, rep++});
        benchmark::DoNotOptimize(count_disjoint_open_paths(g, field).count);
    }
}
BENCHMARK(BM_DisjointPaths3d)->Arg(4)->Arg(8);

BENCHMARK_MAIN();
