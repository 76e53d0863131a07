#pragma once

// Brute-force oracles used by the test suites. Everything here is written
// against the definitions directly, not against the library's algorithms:
// exhaustive enumeration, backtracking, and double-based geometry (halves are
// exact in binary floating point).

#include <cstdint>
#include <vector>

#include "cylflow/capacity.hpp"
#include "cylflow/lattice.hpp"

namespace oracles {

using cylflow::Coord;
using cylflow::Index;

// Count of unordered vertex pairs at L1 distance exactly 1, by scanning all
// pairs of lattice points of the box.
Index pairwise_edge_count(const cylflow::Box& box);

// Independent diamond-adjacency: plaquettes as real intervals with 0.5
// endpoints, closed-box intersection.
bool diamond_adjacent_real(const cylflow::ZEdge& a, const cylflow::ZEdge& b);

// All diamond neighbors of e (excluding e) via midpoint scan + real test.
std::vector<cylflow::ZEdge> diamond_neighbors_real(const cylflow::ZEdge& e);

// True when no simple path joins F_0 to F_m avoiding `removed`, by exhaustive
// depth-first path enumeration.
bool separating_by_path_enumeration(const cylflow::EdgeSet& removed, const cylflow::LatticeGraph& g);

// Minimum of V(E) over all separating edge subsets, enumerated directly.
// Only for tiny graphs (caps at 2^20 subsets).
double subset_min_cut(const cylflow::LatticeGraph& g, const cylflow::CapacityField& field);

// Maximal number of pairwise edge-disjoint open paths from F_0 to F_m by
// path enumeration plus branch-and-bound packing. Field must be 0/1.
Index max_packing_backtracking(const cylflow::LatticeGraph& g, const cylflow::CapacityField& field);

// Maximal number of vertex-disjoint paths in a small directed grid of good
// cells from `bottom` to `top` cells under L1 adjacency, by backtracking.
Index max_vertex_disjoint_paths(const cylflow::Box& grid, const std::vector<std::uint8_t>& good,
                                const std::vector<Index>& bottom, const std::vector<Index>& top);

// One-sample Kolmogorov-Smirnov statistic of `samples` against `cdf`.
double ks_statistic(std::vector<double> samples, const cylflow::CapacityDistribution& dist);

// Deterministic xorshift-style generator for building test instances; kept
// separate from the library's stream so tests do not mirror its stream.
struct TestRng {
    std::uint64_t state;
    explicit TestRng(std::uint64_t seed) : state(seed * 2654435769ULL + 1) {}
    std::uint64_t next() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    }
    // uniform in [0, n)
    std::uint64_t below(std::uint64_t n) { return next() % n; }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

}  // namespace oracles
