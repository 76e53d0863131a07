#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cylflow/capacity.hpp"
#include "cylflow/lattice.hpp"

namespace cylflow {

// A feasible assignment of flow to the lattice edges: a magnitude and an
// orientation per edge. `forward` means the flow runs from the edge's base
// endpoint towards base + unit(axis).
struct Stream {
    std::vector<double> magnitude;
    std::vector<std::int8_t> forward;  // +1 forward, -1 backward (ignored at magnitude 0)
};

// phi as an exact fraction num/den when the solve ran in integer arithmetic.
struct ExactValue {
    long long num = 0;
    long long den = 1;
};

struct FlowResult {
    double value = 0;                // phi, the maximal bottom-to-top flow
    std::optional<ExactValue> exact; // present when capacities were rationalized
    Stream stream;                   // an attaining stream
    EdgeSet min_cut;                 // minimal separating set with V(cut) = phi
    double cut_value = 0;
};

// Exact maximal flow from F_0 to F_m. Atomic distributions are solved in
// scaled integer arithmetic; continuous ones in floating point with the
// duality gap checked against 1e-6 * max(1, phi).
FlowResult max_flow(const LatticeGraph& g, const CapacityField& field);

// The source-side residual cut of max_flow, pruned to minimality in edge
// order. Satisfies is_cut and V(cut) = phi.
EdgeSet min_cut(const LatticeGraph& g, const CapacityField& field);

struct PathPacking {
    // Each path is a vertex index sequence from F_0 to F_m; edges[i] are the
    // matching edge ids. Paths are pairwise edge-disjoint and open.
    std::vector<std::vector<Index>> vertices;
    std::vector<std::vector<Index>> edges;
};

struct DisjointPaths {
    Index count = 0;
    PathPacking packing;
};

// For a 0/1 field, the maximal number of pairwise edge-disjoint open paths
// from F_0 to F_m together with an explicit packing (flow decomposition,
// cycles dropped). Equals max_flow on the same field.
DisjointPaths count_disjoint_open_paths(const LatticeGraph& g, const CapacityField& field);

struct StreamCheck {
    enum class Kind { Ok, Capacity, Conservation };
    Kind kind = Kind::Ok;
    Index where = -1;   // edge id (Capacity) or vertex id (Conservation)
    double excess = 0;  // amount by which the constraint fails
    double flow = 0;    // crossing flow into F_m, valid when kind == Ok

    bool feasible() const { return kind == Kind::Ok; }
    std::string describe() const;
};

// Checks 0 <= g(e) <= t(e) on every edge and conservation at every vertex of
// B minus (F_0 union F_m), then evaluates the crossing flow: the signed sum
// of magnitudes on edges with exactly one endpoint in F_m. Conservation is
// deliberately not required on the bottom face: demanding it there too would
// force zero net flow, so sources emit freely and sinks absorb freely.
// Violations are returned, not thrown; the first one in edge/vertex order
// wins.
StreamCheck validate_stream(const LatticeGraph& g, const CapacityField& field, const Stream& s);

struct BruteForceCut {
    double value = 0;
    std::optional<ExactValue> exact;
};

// Minimum of V(E) over every (F_0,F_m)-separating edge set, by exhausting the
// vertex bipartitions that refine them. Refuses instances above 25 edges.
BruteForceCut brute_force_min_cut(const LatticeGraph& g, const CapacityField& field);

// Sum of capacities of vertical edges between levels j and j+1, minimized
// over j: every such slab separates, so this upper-bounds phi.
double slab_upper_bound(const LatticeGraph& g, const CapacityField& field);

}  // namespace cylflow
