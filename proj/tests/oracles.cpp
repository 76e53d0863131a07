#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracles {

using cylflow::Box;
using cylflow::CapacityField;
using cylflow::EdgeSet;
using cylflow::LatticeGraph;
using cylflow::ZEdge;

Index pairwise_edge_count(const Box& box) {
    const Index nv = box.vertex_count();
    Index count = 0;
    for (Index a = 0; a < nv; ++a) {
        const Coord ca = box.vertex_coord(a);
        for (Index b = a + 1; b < nv; ++b) {
            const Coord cb = box.vertex_coord(b);
            Index l1 = 0;
            for (std::size_t i = 0; i < ca.size(); ++i) l1 += std::llabs(ca[i] - cb[i]);
            if (l1 == 1) ++count;
        }
    }
    return count;
}

namespace {

struct RealQuad {
    std::vector<double> lo, hi;
};

RealQuad real_plaquette(const ZEdge& e) {
    RealQuad q;
    const std::size_t d = e.base.size();
    q.lo.resize(d);
    q.hi.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double mid = static_cast<double>(e.base[i]) + (static_cast<int>(i) == e.axis ? 0.5 : 0.0);
        if (static_cast<int>(i) == e.axis) {
            q.lo[i] = mid;
            q.hi[i] = mid;
        } else {
            q.lo[i] = mid - 0.5;
            q.hi[i] = mid + 0.5;
        }
    }
    return q;
}

}  // namespace

bool diamond_adjacent_real(const ZEdge& a, const ZEdge& b) {
    const RealQuad qa = real_plaquette(a), qb = real_plaquette(b);
    for (std::size_t i = 0; i < qa.lo.size(); ++i) {
        if (qa.lo[i] > qb.hi[i] || qb.lo[i] > qa.hi[i]) return false;
    }
    return true;
}

std::vector<ZEdge> diamond_neighbors_real(const ZEdge& e) {
    const int d = static_cast<int>(e.base.size());
    std::vector<ZEdge> out;
    std::vector<Index> off(static_cast<std::size_t>(d), -2);
    for (;;) {
        ZEdge cand;
        cand.base.resize(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) cand.base[static_cast<std::size_t>(i)] = e.base[static_cast<std::size_t>(i)] + off[static_cast<std::size_t>(i)];
        for (int a = 0; a < d; ++a) {
            cand.axis = a;
            if (cand == e) continue;
            if (diamond_adjacent_real(e, cand)) out.push_back(cand);
        }
        int i = d - 1;
        while (i >= 0 && off[static_cast<std::size_t>(i)] == 2) {
            off[static_cast<std::size_t>(i)] = -2;
            --i;
        }
        if (i < 0) break;
        ++off[static_cast<std::size_t>(i)];
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

bool path_exists_dfs(const LatticeGraph& g, const std::vector<char>& removed, std::vector<char>& visited,
                     Index v) {
    if (g.in_top(v)) return true;
    visited[static_cast<std::size_t>(v)] = 1;
    for (const auto& arc : g.neighbors(v)) {
        if (removed[static_cast<std::size_t>(arc.edge)]) continue;
        if (visited[static_cast<std::size_t>(arc.vertex)]) continue;
        if (path_exists_dfs(g, removed, visited, arc.vertex)) return true;
    }
    visited[static_cast<std::size_t>(v)] = 0;  // enumerate simple paths, not reachability
    return false;
}

}  // namespace

bool separating_by_path_enumeration(const EdgeSet& removed_set, const LatticeGraph& g) {
    std::vector<char> removed(static_cast<std::size_t>(g.edge_count()), 0);
    for (Index e : removed_set) removed[static_cast<std::size_t>(e)] = 1;
    std::vector<char> visited(static_cast<std::size_t>(g.vertex_count()), 0);
    for (Index s : g.bottom()) {
        if (path_exists_dfs(g, removed, visited, s)) return false;
    }
    return true;
}

double subset_min_cut(const LatticeGraph& g, const CapacityField& field) {
    const Index ne = g.edge_count();
    if (ne > 20) throw std::runtime_error("subset_min_cut: too many edges");
    const std::uint64_t total = 1ULL << ne;
    double best = std::numeric_limits<double>::infinity();
    EdgeSet subset;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        double value = 0;
        for (Index e = 0; e < ne; ++e)
            if ((mask >> e) & 1) value += field.at(e);
        if (value >= best) continue;
        subset.clear();
        for (Index e = 0; e < ne; ++e)
            if ((mask >> e) & 1) subset.push_back(e);
        if (separating_by_path_enumeration(subset, g)) best = value;
    }
    return best;
}

namespace {

struct PathList {
    std::vector<std::uint32_t> edge_masks;
};

void enumerate_open_paths(const LatticeGraph& g, const CapacityField& field, Index v,
                          std::vector<char>& visited, std::uint32_t mask, PathList& out) {
    if (g.in_top(v)) {
        out.edge_masks.push_back(mask);
        return;
    }
    visited[static_cast<std::size_t>(v)] = 1;
    for (const auto& arc : g.neighbors(v)) {
        if (field.at(arc.edge) != 1.0) continue;
        if (visited[static_cast<std::size_t>(arc.vertex)]) continue;
        enumerate_open_paths(g, field, arc.vertex, visited, mask | (1u << arc.edge), out);
    }
    visited[static_cast<std::size_t>(v)] = 0;
}

struct Packer {
    const std::vector<std::uint32_t>& paths;
    std::uint32_t vertical_mask_by_level_count;
    std::vector<std::uint32_t> level_masks;  // open vertical edges per level
    Index best = 0;

    void rec(std::size_t i, std::uint32_t used, Index count) {
        best = std::max(best, count);
        if (i >= paths.size()) return;
        // every additional path consumes one unused open vertical per level
        Index bound = std::numeric_limits<Index>::max();
        for (std::uint32_t lm : level_masks) {
            const Index free = __builtin_popcount(lm & ~used);
            bound = std::min(bound, free);
        }
        if (count + std::min<Index>(bound, static_cast<Index>(paths.size() - i)) <= best) return;
        if ((paths[i] & used) == 0) rec(i + 1, used | paths[i], count + 1);
        rec(i + 1, used, count);
    }
};

}  // namespace

Index max_packing_backtracking(const LatticeGraph& g, const CapacityField& field) {
    if (g.edge_count() > 30) throw std::runtime_error("max_packing_backtracking: too many edges");
    PathList paths;
    std::vector<char> visited(static_cast<std::size_t>(g.vertex_count()), 0);
    for (Index s : g.bottom()) enumerate_open_paths(g, field, s, visited, 0, paths);

    Packer packer{paths.edge_masks, 0, {}, 0};
    const int d = g.box().dim();
    const Index offset = g.box().axis_edge_offset(d - 1);
    const Index count = g.box().axis_edge_count(d - 1);
    packer.level_masks.assign(static_cast<std::size_t>(g.spec().height), 0);
    for (Index e = offset; e < offset + count; ++e) {
        if (field.at(e) != 1.0) continue;
        const auto [base, axis] = g.box().edge_base_axis(e);
        packer.level_masks[static_cast<std::size_t>(base[static_cast<std::size_t>(d - 1)])] |= 1u << e;
    }
    packer.rec(0, 0, 0);
    return packer.best;
}

namespace {

struct BlockPacker {
    const Box& grid;
    const std::vector<std::uint8_t>& good;
    const std::vector<Index>& bottom;
    const std::vector<Index>& top;
    Index best = 0;

    bool is_top(Index v) const { return std::find(top.begin(), top.end(), v) != top.end(); }

    // Enumerate simple paths from v over unused good cells; on reaching the
    // top layer, recurse into the next path. Paths start at bottom cells in
    // increasing position, which is lossless for vertex-disjoint packings
    // (each path has its own start).
    void extend(Index v, std::vector<char>& used, Index packed, std::size_t next_start) {
        if (is_top(v)) {
            best = std::max(best, packed + 1);
            start_paths(used, packed + 1, next_start);
            return;
        }
        const Coord c = grid.vertex_coord(v);
        for (std::size_t a = 0; a < c.size(); ++a) {
            for (int sign : {+1, -1}) {
                Coord nb = c;
                nb[a] += sign;
                if (!grid.contains(nb)) continue;
                const Index w = grid.vertex_index(nb);
                if (used[static_cast<std::size_t>(w)] || !good[static_cast<std::size_t>(w)]) continue;
                used[static_cast<std::size_t>(w)] = 1;
                extend(w, used, packed, next_start);
                used[static_cast<std::size_t>(w)] = 0;
            }
        }
    }

    void start_paths(std::vector<char>& used, Index packed, std::size_t min_start) {
        for (std::size_t i = min_start; i < bottom.size(); ++i) {
            const Index s = bottom[i];
            if (used[static_cast<std::size_t>(s)] || !good[static_cast<std::size_t>(s)]) continue;
            used[static_cast<std::size_t>(s)] = 1;
            extend(s, used, packed, i + 1);
            used[static_cast<std::size_t>(s)] = 0;
        }
    }
};

}  // namespace

Index max_vertex_disjoint_paths(const Box& grid, const std::vector<std::uint8_t>& good,
                                const std::vector<Index>& bottom, const std::vector<Index>& top) {
    if (grid.vertex_count() > 24) throw std::runtime_error("max_vertex_disjoint_paths: grid too large");
    BlockPacker packer{grid, good, bottom, top, 0};
    std::vector<char> used(static_cast<std::size_t>(grid.vertex_count()), 0);
    packer.start_paths(used, 0, 0);
    return packer.best;
}

double ks_statistic(std::vector<double> samples, const cylflow::CapacityDistribution& dist) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double worst = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = dist.cdf(samples[i]);
        worst = std::max(worst, static_cast<double>(i + 1) / n - f);
        worst = std::max(worst, f - static_cast<double>(i) / n);
    }
    return worst;
}

}  // namespace oracles
