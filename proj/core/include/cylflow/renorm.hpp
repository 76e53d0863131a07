#pragma once

#include <optional>
#include <vector>

#include "cylflow/capacity.hpp"
#include "cylflow/lattice.hpp"

namespace cylflow {

// The rescaled lattice of side-K blocks B_K(x) = K*x + Lambda(K), where
// Lambda(K) is the half-open cube ]-K/2, K/2]^d. K must be even so the
// half-shifts K/2 land on lattice vectors; the blocks then partition Z^d.
class BlockLattice {
  public:
    BlockLattice(int d, Index K);

    int dim() const { return d_; }
    Index K() const { return k_; }

    // Vertex box of the block at rescaled index x.
    Box block_box(const Coord& x) const;
    // Rescaled index of the block containing a lattice vertex.
    Coord block_of(const Coord& vertex) const;
    // All indices x with B_K(x) meeting the region (an index box).
    Box rescale_region(const Box& region) const;

  private:
    int d_;
    Index k_;
};

// Per-block event flags: U (open crossing cluster), W in the block itself and
// W in each of the 2d half-shifted boxes, all at diameter threshold ceil(K/3).
struct BlockEvents {
    bool crossing = false;              // U(B_K(x))
    bool unique_center = false;         // W(B_K(x), ceil(K/3))
    std::vector<bool> unique_shifted;   // W(B_K(x) +- (K/2) e_j, ...), 2d flags

    bool good() const {
        if (!crossing || !unique_center) return false;
        for (bool w : unique_shifted)
            if (!w) return false;
        return true;
    }
};

// The block process X_K over a box of rescaled indices.
struct BlockProcess {
    int d = 2;
    Index K = 2;
    Box domain;                        // index box
    std::vector<BlockEvents> events;   // lex order over domain
    std::vector<std::uint8_t> x;       // X_K values, same order

    Index index_of(const Coord& block) const { return domain.vertex_index(block); }
    bool good(const Coord& block) const { return x[static_cast<std::size_t>(index_of(block))] != 0; }
};

// Open crossing cluster: some component of the open subgraph inside the box
// touches all 2d faces of the inner vertex boundary.
bool event_U(const CapacityField& field, const Box& box);

// Exactly one open cluster inside the box has diameter >= m (diameter being
// the largest single-coordinate spread). Requires 1 <= m <= diam(box).
bool event_W(const CapacityField& field, const Box& box, Index m);

// Evaluates X_K over every index in `domain`. The field must cover each block
// and each half-shifted box; a missing box raises CoverageError naming it.
BlockProcess block_process(const CapacityField& field, Index K, const Box& domain);

struct DeltaEstimate {
    double delta_hat = 0;  // estimate of P[X_K(0) = 0]
    double ci_lo = 0, ci_hi = 1;  // 99% Wilson interval
    Index replicates = 0;
    Index bad = 0;
};

// Monte Carlo estimate of delta_K = P[X_K(0) = 0] under Bernoulli(p).
DeltaEstimate estimate_delta_K(int d, Index K, double p, Index replicates, const SeedSpec& seed,
                               int threads = 1);

// Equivalence class of a rescaled index under coordinate-wise mod 3, encoded
// as a label in 1..3^d.
int class_of(const Coord& block);

// Every Z^d edge examined when evaluating X_K(x): the edges inside B_K(x) and
// inside each half-shifted box. Sorted canonically.
std::vector<ZEdge> dependency_support(const Coord& block, Index K);

struct CrossingPath {
    std::vector<Coord> vertices;  // F_0 to F_m of the cylinder, inside the block union
};

// Searches for an open path between the cylinder's bottom and top faces using
// only edges inside the union of the listed blocks. Preconditions: the blocks
// form an L1-connected sequence and every one is good. With those satisfied a
// failure is a counterexample, returned as nullopt for the caller to record.
std::optional<CrossingPath> construct_crossing_path(const CapacityField& field, Index K,
                                                    const Box& cylinder,
                                                    const std::vector<Coord>& block_path);

// Maximal number of vertex-disjoint L1 paths of good blocks from the bottom
// block layer to the top block layer of the rescaled cylinder (block layers
// are the rescalings of the cylinder's faces). Unit-vertex-capacity max flow
// via vertex splitting.
Index count_block_disjoint_paths(const BlockProcess& bp, const Box& cylinder);

enum class BoxEvent { CrossingCluster, UniqueLargeCluster };

struct ExactEventProbability {
    double probability = 0;
    Index satisfying = 0;   // configurations where the event holds
    Index total = 0;        // 2^(edges in box)
};

// Exhausts all open/closed configurations of the box's edges (cap: 20 edges)
// and sums their Bernoulli(p) weights over the event.
ExactEventProbability exact_event_probability(BoxEvent kind, const Box& box, double p, Index m = 0);

}  // namespace cylflow
