#include "cylflow/lattice.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "cylflow/union_find.hpp"

namespace cylflow {

namespace {

std::string coord_str(const Coord& c) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << ")";
    return os.str();
}

}  // namespace

Box::Box(Coord lo, Coord hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.empty() || lo_.size() != hi_.size()) throw ConfigError("box: mismatched bounds");
    const int d = dim();
    for (int i = 0; i < d; ++i) {
        if (lo_[static_cast<std::size_t>(i)] > hi_[static_cast<std::size_t>(i)])
            throw ConfigError("box: lo > hi on axis " + std::to_string(i));
    }
    vstride_.assign(static_cast<std::size_t>(d), 1);
    for (int i = d - 2; i >= 0; --i)
        vstride_[static_cast<std::size_t>(i)] = vstride_[static_cast<std::size_t>(i) + 1] * side(i + 1);
    vcount_ = vstride_[0] * side(0);

    eoffset_.assign(static_cast<std::size_t>(d) + 1, 0);
    for (int a = 0; a < d; ++a) {
        Index n = side(a) - 1;  // unit steps along a
        for (int j = 0; j < d; ++j)
            if (j != a) n *= side(j);
        eoffset_[static_cast<std::size_t>(a) + 1] = eoffset_[static_cast<std::size_t>(a)] + n;
    }
}

Index Box::diameter() const {
    Index m = 0;
    for (int i = 0; i < dim(); ++i) m = std::max(m, side(i) - 1);
    return m;
}

bool Box::contains(const Coord& c) const {
    if (static_cast<int>(c.size()) != dim()) return false;
    for (int i = 0; i < dim(); ++i) {
        if (c[static_cast<std::size_t>(i)] < lo_[static_cast<std::size_t>(i)] ||
            c[static_cast<std::size_t>(i)] > hi_[static_cast<std::size_t>(i)])
            return false;
    }
    return true;
}

bool Box::contains_box(const Box& inner) const {
    return contains(inner.lo()) && contains(inner.hi());
}

Index Box::vertex_index(const Coord& c) const {
    Index idx = 0;
    for (int i = 0; i < dim(); ++i)
        idx += (c[static_cast<std::size_t>(i)] - lo_[static_cast<std::size_t>(i)]) * vstride_[static_cast<std::size_t>(i)];
    return idx;
}

Coord Box::vertex_coord(Index v) const {
    Coord c(static_cast<std::size_t>(dim()));
    for (int i = 0; i < dim(); ++i) {
        c[static_cast<std::size_t>(i)] = lo_[static_cast<std::size_t>(i)] + v / vstride_[static_cast<std::size_t>(i)];
        v %= vstride_[static_cast<std::size_t>(i)];
    }
    return c;
}

Index Box::edge_index(const Coord& base, int axis) const {
    // Lex rank of the base vertex inside the box shrunk by one along `axis`.
    Index idx = 0;
    Index stride = 1;
    for (int i = dim() - 1; i >= 0; --i) {
        idx += (base[static_cast<std::size_t>(i)] - lo_[static_cast<std::size_t>(i)]) * stride;
        stride *= (i == axis) ? side(i) - 1 : side(i);
    }
    return eoffset_[static_cast<std::size_t>(axis)] + idx;
}

std::pair<Coord, int> Box::edge_base_axis(Index e) const {
    int axis = 0;
    while (e >= eoffset_[static_cast<std::size_t>(axis) + 1]) ++axis;
    Index r = e - eoffset_[static_cast<std::size_t>(axis)];
    Coord c(static_cast<std::size_t>(dim()));
    for (int i = dim() - 1; i >= 0; --i) {
        const Index s = (i == axis) ? side(i) - 1 : side(i);
        c[static_cast<std::size_t>(i)] = lo_[static_cast<std::size_t>(i)] + r % s;
        r /= s;
    }
    return {c, axis};
}

int Box::edge_axis(Index e) const {
    int axis = 0;
    while (e >= eoffset_[static_cast<std::size_t>(axis) + 1]) ++axis;
    return axis;
}

std::pair<Index, Index> Box::edge_vertices(Index e) const {
    auto [base, axis] = edge_base_axis(e);
    const Index u = vertex_index(base);
    return {u, u + vstride_[static_cast<std::size_t>(axis)]};
}

Box Box::shifted(const Coord& offset) const {
    Coord lo = lo_, hi = hi_;
    for (int i = 0; i < dim(); ++i) {
        lo[static_cast<std::size_t>(i)] += offset[static_cast<std::size_t>(i)];
        hi[static_cast<std::size_t>(i)] += offset[static_cast<std::size_t>(i)];
    }
    return Box(std::move(lo), std::move(hi));
}

std::string Box::describe() const {
    return coord_str(lo_) + ".." + coord_str(hi_);
}

Plaquette plaquette_of(const ZEdge& e) {
    Plaquette p;
    p.axis = e.axis;
    p.center2.resize(e.base.size());
    for (std::size_t i = 0; i < e.base.size(); ++i) p.center2[i] = 2 * e.base[i];
    p.center2[static_cast<std::size_t>(e.axis)] += 1;
    return p;
}

bool plaquettes_intersect(const Plaquette& a, const Plaquette& b) {
    for (int i = 0; i < static_cast<int>(a.center2.size()); ++i) {
        const auto [alo, ahi] = a.extent2(i);
        const auto [blo, bhi] = b.extent2(i);
        if (alo > bhi || blo > ahi) return false;
    }
    return true;
}

bool diamond_adjacent(const ZEdge& a, const ZEdge& b) {
    return plaquettes_intersect(plaquette_of(a), plaquette_of(b));
}

std::vector<ZEdge> diamond_neighbors(const ZEdge& e) {
    // Plaquettes have half-width 1/2, so intersecting midpoints sit within
    // L-inf distance 1; scanning bases within distance 2 is safely exhaustive.
    const int d = static_cast<int>(e.base.size());
    std::vector<ZEdge> out;
    Coord off(static_cast<std::size_t>(d), -2);
    for (;;) {
        ZEdge cand;
        cand.base.resize(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i)
            cand.base[static_cast<std::size_t>(i)] = e.base[static_cast<std::size_t>(i)] + off[static_cast<std::size_t>(i)];
        for (int a = 0; a < d; ++a) {
            cand.axis = a;
            if (cand == e) continue;
            if (diamond_adjacent(e, cand)) out.push_back(cand);
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

void CylinderSpec::validate() const {
    if (d < 2) throw ConfigError("cylinder: dimension must be >= 2, got " + std::to_string(d));
    if (static_cast<int>(sides.size()) != d - 1)
        throw ConfigError("cylinder: expected " + std::to_string(d - 1) + " side lengths, got " +
                          std::to_string(sides.size()));
    for (Index k : sides)
        if (k < 1) throw ConfigError("cylinder: side lengths must be >= 1, got " + std::to_string(k));
    if (height < 1) throw ConfigError("cylinder: height must be >= 1, got " + std::to_string(height));
}

Box CylinderSpec::box() const {
    Coord lo(static_cast<std::size_t>(d), 0);
    Coord hi(sides.begin(), sides.end());
    hi.push_back(height);
    return Box(std::move(lo), std::move(hi));
}

LatticeGraph LatticeGraph::build(const CylinderSpec& spec) {
    spec.validate();
    LatticeGraph g;
    g.spec_ = spec;
    g.box_ = spec.box();
    const Box& box = g.box_;
    const int d = box.dim();
    const Index nv = box.vertex_count();

    g.adj_.resize(static_cast<std::size_t>(nv));
    for (Index v = 0; v < nv; ++v) {
        Coord c = box.vertex_coord(v);
        auto& arcs = g.adj_[static_cast<std::size_t>(v)];
        for (int a = 0; a < d; ++a) {
            if (c[static_cast<std::size_t>(a)] > box.lo()[static_cast<std::size_t>(a)]) {
                Coord base = c;
                base[static_cast<std::size_t>(a)] -= 1;
                arcs.push_back({box.vertex_index(base), box.edge_index(base, a)});
            }
            if (c[static_cast<std::size_t>(a)] < box.hi()[static_cast<std::size_t>(a)]) {
                Coord tip = c;
                tip[static_cast<std::size_t>(a)] += 1;
                arcs.push_back({box.vertex_index(tip), box.edge_index(c, a)});
            }
        }
    }

    for (Index v = 0; v < nv; ++v) {
        Coord c = box.vertex_coord(v);
        if (c[static_cast<std::size_t>(d - 1)] == 0) g.f0_.push_back(v);
        if (c[static_cast<std::size_t>(d - 1)] == spec.height) g.fm_.push_back(v);
    }
    return g;
}

bool LatticeGraph::in_bottom(Index v) const {
    return box_.vertex_coord(v)[static_cast<std::size_t>(box_.dim() - 1)] == 0;
}

bool LatticeGraph::in_top(Index v) const {
    return box_.vertex_coord(v)[static_cast<std::size_t>(box_.dim() - 1)] == spec_.height;
}

ZEdge LatticeGraph::edge(Index e) const {
    auto [base, axis] = box_.edge_base_axis(e);
    return ZEdge{std::move(base), axis};
}

LatticeGraph build_cylinder(const CylinderSpec& spec) { return LatticeGraph::build(spec); }

namespace {

bool separating_with_mask(const std::vector<char>& removed, const LatticeGraph& g) {
    std::vector<char> seen(static_cast<std::size_t>(g.vertex_count()), 0);
    std::deque<Index> queue;
    for (Index v : g.bottom()) {
        seen[static_cast<std::size_t>(v)] = 1;
        queue.push_back(v);
    }
    while (!queue.empty()) {
        const Index v = queue.front();
        queue.pop_front();
        if (g.in_top(v)) return false;
        for (const auto& arc : g.neighbors(v)) {
            if (removed[static_cast<std::size_t>(arc.edge)]) continue;
            if (!seen[static_cast<std::size_t>(arc.vertex)]) {
                seen[static_cast<std::size_t>(arc.vertex)] = 1;
                queue.push_back(arc.vertex);
            }
        }
    }
    return true;
}

}  // namespace

bool is_separating(const EdgeSet& e, const LatticeGraph& g) {
    std::vector<char> removed(static_cast<std::size_t>(g.edge_count()), 0);
    for (Index idx : e) {
        if (idx < 0 || idx >= g.edge_count())
            throw ConfigError("edge set: index " + std::to_string(idx) + " out of range");
        removed[static_cast<std::size_t>(idx)] = 1;
    }
    return separating_with_mask(removed, g);
}

bool is_cut(const EdgeSet& e, const LatticeGraph& g) {
    std::vector<char> removed(static_cast<std::size_t>(g.edge_count()), 0);
    for (Index idx : e) {
        if (idx < 0 || idx >= g.edge_count())
            throw ConfigError("edge set: index " + std::to_string(idx) + " out of range");
        removed[static_cast<std::size_t>(idx)] = 1;
    }
    if (!separating_with_mask(removed, g)) return false;
    for (Index idx : e) {
        removed[static_cast<std::size_t>(idx)] = 0;
        const bool still = separating_with_mask(removed, g);
        removed[static_cast<std::size_t>(idx)] = 1;
        if (still) return false;
    }
    return true;
}

bool diamond_connected(const EdgeSet& e, const LatticeGraph& g) {
    if (e.empty()) throw ConfigError("diamond_connected: empty edge set");
    std::vector<Plaquette> plaq;
    plaq.reserve(e.size());
    for (Index idx : e) plaq.push_back(plaquette_of(g.edge(idx)));
    UnionFind uf(static_cast<Index>(e.size()));
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = i + 1; j < e.size(); ++j)
            if (plaquettes_intersect(plaq[i], plaq[j])) uf.unite(static_cast<Index>(i), static_cast<Index>(j));
    return uf.components() == 1;
}

}  // namespace cylflow
