#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cylflow/errors.hpp"

namespace cylflow {

using Index = std::int64_t;
using Coord = std::vector<Index>;

// Axis-aligned box of lattice points, bounds inclusive on every axis.
//
// Vertices are indexed lexicographically with the first coordinate most
// significant. Edges are grouped by axis; within an axis they follow the lex
// order of the lower endpoint. Both orders are part of the contract: seeded
// sampling, CSV dumps and cut geometry all rely on them being stable across
// runs and platforms.
class Box {
  public:
    Box() = default;
    Box(Coord lo, Coord hi);

    int dim() const { return static_cast<int>(lo_.size()); }
    const Coord& lo() const { return lo_; }
    const Coord& hi() const { return hi_; }
    Index side(int axis) const { return hi_[static_cast<std::size_t>(axis)] - lo_[static_cast<std::size_t>(axis)] + 1; }
    // Largest coordinate difference between two points of the box.
    Index diameter() const;

    Index vertex_count() const { return vcount_; }
    Index edge_count() const { return eoffset_.back(); }
    Index axis_edge_count(int axis) const {
        return eoffset_[static_cast<std::size_t>(axis) + 1] - eoffset_[static_cast<std::size_t>(axis)];
    }
    Index axis_edge_offset(int axis) const { return eoffset_[static_cast<std::size_t>(axis)]; }

    bool contains(const Coord& c) const;
    bool contains_box(const Box& inner) const;

    Index vertex_index(const Coord& c) const;
    Coord vertex_coord(Index v) const;

    // Edge <base, base + unit(axis)>; both endpoints must lie in the box.
    Index edge_index(const Coord& base, int axis) const;
    std::pair<Coord, int> edge_base_axis(Index e) const;
    int edge_axis(Index e) const;
    std::pair<Index, Index> edge_vertices(Index e) const;

    Box shifted(const Coord& offset) const;
    std::string describe() const;

    friend bool operator==(const Box& a, const Box& b) { return a.lo_ == b.lo_ && a.hi_ == b.hi_; }

  private:
    Coord lo_, hi_;
    Index vcount_ = 0;
    std::vector<Index> vstride_;   // vertex strides, last axis least significant
    std::vector<Index> eoffset_;   // cumulative edge counts per axis, size dim+1
};

// An edge of Z^d, canonically the lower endpoint plus the axis it runs along.
struct ZEdge {
    Coord base;
    int axis = 0;

    Coord tip() const {
        Coord t = base;
        t[static_cast<std::size_t>(axis)] += 1;
        return t;
    }
    friend bool operator==(const ZEdge& a, const ZEdge& b) { return a.axis == b.axis && a.base == b.base; }
    friend bool operator<(const ZEdge& a, const ZEdge& b) {
        if (a.base != b.base) return a.base < b.base;
        return a.axis < b.axis;
    }
};

// The unit (d-1)-cube crossing an edge at its midpoint, orthogonal to it.
// Coordinates are doubled so all geometry stays in integers: the plaquette of
// <x, x+e_i> spans [2x_j-1, 2x_j+1] on axes j != i and is flat at 2x_i+1 on i.
struct Plaquette {
    Coord center2;  // doubled coordinates of the edge midpoint
    int axis = 0;   // normal axis (= axis of the crossed edge)

    std::pair<Index, Index> extent2(int along) const {
        const Index c = center2[static_cast<std::size_t>(along)];
        if (along == axis) return {c, c};
        return {c - 1, c + 1};
    }
};

Plaquette plaquette_of(const ZEdge& e);
bool plaquettes_intersect(const Plaquette& a, const Plaquette& b);

// Two edges are diamond-adjacent when their closed plaquettes intersect.
// Reflexive and symmetric; a property of Z^d, independent of any box.
bool diamond_adjacent(const ZEdge& a, const ZEdge& b);

// All edges diamond-adjacent to e, excluding e itself, in canonical order.
std::vector<ZEdge> diamond_neighbors(const ZEdge& e);

// The cylinder prod([0, k_i]) x [0, m]: d-1 side lengths plus a height along
// the last axis.
struct CylinderSpec {
    int d = 2;
    std::vector<Index> sides;  // k_1 .. k_{d-1}
    Index height = 1;          // m

    void validate() const;  // throws ConfigError
    Box box() const;
};

using EdgeSet = std::vector<Index>;

// The graph of a cylinder: lattice points of the box, nearest-neighbor edges
// with both endpoints inside, and the bottom/top faces.
class LatticeGraph {
  public:
    static LatticeGraph build(const CylinderSpec& spec);

    const CylinderSpec& spec() const { return spec_; }
    const Box& box() const { return box_; }
    Index vertex_count() const { return box_.vertex_count(); }
    Index edge_count() const { return box_.edge_count(); }

    const std::vector<Index>& bottom() const { return f0_; }  // F_0, lex order
    const std::vector<Index>& top() const { return fm_; }     // F_m, lex order
    bool in_bottom(Index v) const;
    bool in_top(Index v) const;

    ZEdge edge(Index e) const;
    std::pair<Index, Index> edge_vertices(Index e) const { return box_.edge_vertices(e); }

    // Neighbors of v as (vertex, edge id) pairs, in axis order.
    struct Arc {
        Index vertex;
        Index edge;
    };
    const std::vector<Arc>& neighbors(Index v) const { return adj_[static_cast<std::size_t>(v)]; }

  private:
    CylinderSpec spec_;
    Box box_;
    std::vector<Index> f0_, fm_;
    std::vector<std::vector<Arc>> adj_;
};

LatticeGraph build_cylinder(const CylinderSpec& spec);

// True when removing E disconnects F_0 from F_m inside the box.
bool is_separating(const EdgeSet& e, const LatticeGraph& g);

// True when E separates and no proper subset does (equivalently: removing any
// single element of E reopens a path).
bool is_cut(const EdgeSet& e, const LatticeGraph& g);

// True when the edges of E form a single component under diamond-adjacency.
// Throws ConfigError on an empty set; connectivity is undefined there.
bool diamond_connected(const EdgeSet& e, const LatticeGraph& g);

}  // namespace cylflow
