#include "cylflow/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <functional>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "cylflow/parallel.hpp"
#include "cylflow/union_find.hpp"

namespace cylflow {

namespace {

Index floor_div(Index a, Index b) {
    Index q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

Index ceil_div(Index a, Index b) { return -floor_div(-a, b); }

// Diameter threshold of the W events: ceil(K/3).
Index w_threshold(Index K) { return (K + 2) / 3; }

std::uint64_t pack_coord(const Coord& c) {
    // 21 bits per coordinate, d <= 3 in anger; enough for d <= 3 with room.
    std::uint64_t key = 0xcbf29ce484222325ULL;
    for (Index v : c) {
        key ^= static_cast<std::uint64_t>(v + (1LL << 40));
        key *= 0x100000001b3ULL;
    }
    return key;
}

// ---------------------------------------------------------------------------
// Topology of a box shape, reusable across translates: local edges as vertex
// pairs plus (local base offset, axis) for mapping into an ambient field, and
// per-vertex face masks for crossing detection.
// ---------------------------------------------------------------------------
struct BoxShape {
    Box local;  // at the box's own coordinates (only sides matter)
    std::vector<std::pair<Index, Index>> edge_ends;
    std::vector<std::pair<Coord, int>> edge_base;  // base offset from box lo, axis
    std::vector<std::uint32_t> face_mask;          // bit 2a: x_a == lo_a, bit 2a+1: x_a == hi_a

    explicit BoxShape(const Box& box) : local(box) {
        const int d = box.dim();
        const Index ne = box.edge_count();
        edge_ends.reserve(static_cast<std::size_t>(ne));
        edge_base.reserve(static_cast<std::size_t>(ne));
        for (Index e = 0; e < ne; ++e) {
            edge_ends.push_back(box.edge_vertices(e));
            auto [base, axis] = box.edge_base_axis(e);
            for (int i = 0; i < d; ++i) base[static_cast<std::size_t>(i)] -= box.lo()[static_cast<std::size_t>(i)];
            edge_base.emplace_back(std::move(base), axis);
        }
        face_mask.resize(static_cast<std::size_t>(box.vertex_count()), 0);
        for (Index v = 0; v < box.vertex_count(); ++v) {
            const Coord c = box.vertex_coord(v);
            std::uint32_t mask = 0;
            for (int a = 0; a < d; ++a) {
                if (c[static_cast<std::size_t>(a)] == box.lo()[static_cast<std::size_t>(a)]) mask |= 1u << (2 * a);
                if (c[static_cast<std::size_t>(a)] == box.hi()[static_cast<std::size_t>(a)]) mask |= 1u << (2 * a + 1);
            }
            face_mask[static_cast<std::size_t>(v)] = mask;
        }
    }

    std::uint32_t full_mask() const { return (1u << (2 * local.dim())) - 1; }
};

// Evaluates U and W on one translate of a shape against an ambient 0/1 field.
class EventEvaluator {
  public:
    EventEvaluator(const BoxShape& shape, const CapacityField& field) : shape_(shape), field_(field) {}

    // open(e) for the translate of the shape whose lower corner sits at `lo`.
    bool edge_open(std::size_t local_edge, const Coord& lo) const {
        const auto& [offset, axis] = shape_.edge_base[local_edge];
        Coord base = lo;
        for (std::size_t i = 0; i < base.size(); ++i) base[i] += offset[i];
        return field_.at(field_.domain.edge_index(base, axis)) == 1.0;
    }

    bool crossing(const Coord& lo) const {
        const Index nv = shape_.local.vertex_count();
        UnionFind uf(nv);
        for (std::size_t e = 0; e < shape_.edge_ends.size(); ++e)
            if (edge_open(e, lo)) uf.unite(shape_.edge_ends[e].first, shape_.edge_ends[e].second);
        std::vector<std::uint32_t> mask(static_cast<std::size_t>(nv), 0);
        for (Index v = 0; v < nv; ++v)
            mask[static_cast<std::size_t>(uf.find(v))] |= shape_.face_mask[static_cast<std::size_t>(v)];
        const std::uint32_t full = shape_.full_mask();
        for (Index v = 0; v < nv; ++v)
            if (uf.find(v) == v && mask[static_cast<std::size_t>(v)] == full) return true;
        return false;
    }

    bool unique_large(const Coord& lo, Index m) const {
        const Index nv = shape_.local.vertex_count();
        const int d = shape_.local.dim();
        UnionFind uf(nv);
        for (std::size_t e = 0; e < shape_.edge_ends.size(); ++e)
            if (edge_open(e, lo)) uf.unite(shape_.edge_ends[e].first, shape_.edge_ends[e].second);
        std::vector<Coord> cmin(static_cast<std::size_t>(nv)), cmax(static_cast<std::size_t>(nv));
        for (Index v = 0; v < nv; ++v) {
            const Index r = uf.find(v);
            Coord c = shape_.local.vertex_coord(v);
            auto& lo_r = cmin[static_cast<std::size_t>(r)];
            auto& hi_r = cmax[static_cast<std::size_t>(r)];
            if (lo_r.empty()) {
                lo_r = c;
                hi_r = c;
            } else {
                for (int i = 0; i < d; ++i) {
                    lo_r[static_cast<std::size_t>(i)] = std::min(lo_r[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(i)]);
                    hi_r[static_cast<std::size_t>(i)] = std::max(hi_r[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(i)]);
                }
            }
        }
        Index qualifying = 0;
        for (Index v = 0; v < nv; ++v) {
            if (uf.find(v) != v) continue;
            Index diam = 0;
            for (int i = 0; i < d; ++i)
                diam = std::max(diam, cmax[static_cast<std::size_t>(v)][static_cast<std::size_t>(i)] -
                                          cmin[static_cast<std::size_t>(v)][static_cast<std::size_t>(i)]);
            if (diam >= m) {
                if (++qualifying > 1) return false;
            }
        }
        return qualifying == 1;
    }

  private:
    const BoxShape& shape_;
    const CapacityField& field_;
};

void check_box_values(const CapacityField& field, const Box& box) {
    if (!field.domain.contains_box(box))
        throw CoverageError("field " + field.domain.describe() + " does not cover box " + box.describe());
    const Index ne = box.edge_count();
    for (Index e = 0; e < ne; ++e) {
        auto [base, axis] = box.edge_base_axis(e);
        const double v = field.at(field.domain.edge_index(base, axis));
        if (v != 0.0 && v != 1.0)
            throw ConfigError("event evaluation requires a 0/1 field; found " + std::to_string(v));
    }
}

}  // namespace

BlockLattice::BlockLattice(int d, Index K) : d_(d), k_(K) {
    if (d < 1) throw ConfigError("block lattice: dimension must be >= 1");
    if (K < 2 || K % 2 != 0)
        throw ConfigError("block lattice: K must be a positive even integer, got " + std::to_string(K) +
                          " (the K/2 shifts must be lattice vectors)");
}

Box BlockLattice::block_box(const Coord& x) const {
    Coord lo(static_cast<std::size_t>(d_)), hi(static_cast<std::size_t>(d_));
    for (int i = 0; i < d_; ++i) {
        lo[static_cast<std::size_t>(i)] = k_ * x[static_cast<std::size_t>(i)] - k_ / 2 + 1;
        hi[static_cast<std::size_t>(i)] = k_ * x[static_cast<std::size_t>(i)] + k_ / 2;
    }
    return Box(std::move(lo), std::move(hi));
}

Coord BlockLattice::block_of(const Coord& vertex) const {
    Coord x(static_cast<std::size_t>(d_));
    for (int i = 0; i < d_; ++i)
        x[static_cast<std::size_t>(i)] = floor_div(vertex[static_cast<std::size_t>(i)] + k_ / 2 - 1, k_);
    return x;
}

Box BlockLattice::rescale_region(const Box& region) const {
    if (region.dim() != d_) throw ConfigError("rescale_region: dimension mismatch");
    Coord lo(static_cast<std::size_t>(d_)), hi(static_cast<std::size_t>(d_));
    for (int i = 0; i < d_; ++i) {
        // B_K(x) spans [Kx - K/2 + 1, Kx + K/2]; it meets [a, b] iff
        // Kx - K/2 + 1 <= b and Kx + K/2 >= a.
        lo[static_cast<std::size_t>(i)] = ceil_div(region.lo()[static_cast<std::size_t>(i)] - k_ / 2, k_);
        hi[static_cast<std::size_t>(i)] = floor_div(region.hi()[static_cast<std::size_t>(i)] + k_ / 2 - 1, k_);
    }
    return Box(std::move(lo), std::move(hi));
}

bool event_U(const CapacityField& field, const Box& box) {
    check_box_values(field, box);
    BoxShape shape(box);
    EventEvaluator ev(shape, field);
    return ev.crossing(box.lo());
}

bool event_W(const CapacityField& field, const Box& box, Index m) {
    if (m < 1 || m > box.diameter())
        throw ConfigError("event_W: threshold " + std::to_string(m) + " outside [1, diam=" +
                          std::to_string(box.diameter()) + "]");
    check_box_values(field, box);
    BoxShape shape(box);
    EventEvaluator ev(shape, field);
    return ev.unique_large(box.lo(), m);
}

BlockProcess block_process(const CapacityField& field, Index K, const Box& domain) {
    const int d = domain.dim();
    BlockLattice lat(d, K);
    const Index m = w_threshold(K);

    BlockProcess bp;
    bp.d = d;
    bp.K = K;
    bp.domain = domain;
    const Index nblocks = domain.vertex_count();
    bp.events.resize(static_cast<std::size_t>(nblocks));
    bp.x.resize(static_cast<std::size_t>(nblocks));

    // All event boxes are translates of Lambda(K): share one topology, and
    // share W evaluations between neighboring blocks (the +K/2 shift of x is
    // the -K/2 shift of x + e_j).
    const BoxShape shape(lat.block_box(Coord(static_cast<std::size_t>(d), 0)));
    if (!field.zero_one()) throw ConfigError("block_process requires a 0/1 field");
    EventEvaluator ev(shape, field);
    std::unordered_map<std::uint64_t, bool> w_cache;

    auto w_at = [&](const Coord& lo) {
        const std::uint64_t key = pack_coord(lo);
        auto it = w_cache.find(key);
        if (it != w_cache.end()) return it->second;
        const bool val = ev.unique_large(lo, m);
        w_cache.emplace(key, val);
        return val;
    };
    auto covered = [&](const Coord& lo) {
        Coord hi = lo;
        for (int i = 0; i < d; ++i) hi[static_cast<std::size_t>(i)] += K - 1;
        const Box box(lo, hi);
        if (!field.domain.contains_box(box))
            throw CoverageError("block_process: field " + field.domain.describe() + " does not cover box " +
                                box.describe());
    };

    for (Index b = 0; b < nblocks; ++b) {
        const Coord x = domain.vertex_coord(b);
        const Box block = lat.block_box(x);
        BlockEvents flags;
        covered(block.lo());
        flags.crossing = ev.crossing(block.lo());
        flags.unique_center = w_at(block.lo());
        flags.unique_shifted.reserve(static_cast<std::size_t>(2 * d));
        for (int a = 0; a < d; ++a) {
            for (int sign : {+1, -1}) {
                Coord lo = block.lo();
                lo[static_cast<std::size_t>(a)] += sign * (K / 2);
                covered(lo);
                flags.unique_shifted.push_back(w_at(lo));
            }
        }
        bp.x[static_cast<std::size_t>(b)] = flags.good() ? 1 : 0;
        bp.events[static_cast<std::size_t>(b)] = std::move(flags);
    }
    return bp;
}

namespace {

double wilson_lo(double phat, double n, double z) {
    const double z2 = z * z;
    const double denom = 1 + z2 / n;
    const double center = phat + z2 / (2 * n);
    const double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n));
    return std::max(0.0, (center - half) / denom);
}

double wilson_hi(double phat, double n, double z) {
    const double z2 = z * z;
    const double denom = 1 + z2 / n;
    const double center = phat + z2 / (2 * n);
    const double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n));
    return std::min(1.0, (center + half) / denom);
}

constexpr double kZ99 = 2.5758293035489004;  // two-sided 99%

}  // namespace

DeltaEstimate estimate_delta_K(int d, Index K, double p, Index replicates, const SeedSpec& seed,
                               int threads) {
    if (replicates < 1) throw ConfigError("estimate_delta_K: replicates must be >= 1");
    BlockLattice lat(d, K);
    const Coord origin(static_cast<std::size_t>(d), 0);
    const Box block = lat.block_box(origin);
    // Ambient box covering the block and its 2d half-shifted boxes.
    Coord lo = block.lo(), hi = block.hi();
    for (int i = 0; i < d; ++i) {
        lo[static_cast<std::size_t>(i)] -= K / 2;
        hi[static_cast<std::size_t>(i)] += K / 2;
    }
    const Box ambient(lo, hi);
    const Box domain(origin, origin);
    const auto dist = CapacityDistribution::bernoulli(p);

    const auto flags = run_indexed(replicates, threads, [&](Index r) -> std::uint8_t {
        const CapacityField field =
            sample_capacities(ambient, dist, SeedSpec{seed.seed, seed.replicate + static_cast<std::uint64_t>(r)});
        const BlockProcess bp = block_process(field, K, domain);
        return bp.x[0] == 0 ? std::uint8_t{1} : std::uint8_t{0};
    });

    DeltaEstimate est;
    est.replicates = replicates;
    for (std::uint8_t f : flags) est.bad += f;
    est.delta_hat = static_cast<double>(est.bad) / static_cast<double>(replicates);
    est.ci_lo = wilson_lo(est.delta_hat, static_cast<double>(replicates), kZ99);
    est.ci_hi = wilson_hi(est.delta_hat, static_cast<double>(replicates), kZ99);
    return est;
}

int class_of(const Coord& block) {
    int label = 0;
    int scale = 1;
    for (Index v : block) {
        const int r = static_cast<int>(((v % 3) + 3) % 3);
        label += r * scale;
        scale *= 3;
    }
    return label + 1;
}

std::vector<ZEdge> dependency_support(const Coord& block, Index K) {
    const int d = static_cast<int>(block.size());
    BlockLattice lat(d, K);
    const Box center = lat.block_box(block);
    std::vector<Box> boxes{center};
    for (int a = 0; a < d; ++a) {
        for (int sign : {+1, -1}) {
            Coord off(static_cast<std::size_t>(d), 0);
            off[static_cast<std::size_t>(a)] = sign * (K / 2);
            boxes.push_back(center.shifted(off));
        }
    }
    std::vector<ZEdge> support;
    for (const Box& box : boxes) {
        const Index ne = box.edge_count();
        for (Index e = 0; e < ne; ++e) {
            auto [base, axis] = box.edge_base_axis(e);
            support.push_back(ZEdge{std::move(base), axis});
        }
    }
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    return support;
}

std::optional<CrossingPath> construct_crossing_path(const CapacityField& field, Index K,
                                                    const Box& cylinder,
                                                    const std::vector<Coord>& block_path) {
    const int d = cylinder.dim();
    BlockLattice lat(d, K);
    if (block_path.empty()) throw ConfigError("construct_crossing_path: empty block path");
    for (std::size_t i = 1; i < block_path.size(); ++i) {
        Index l1 = 0;
        for (int j = 0; j < d; ++j)
            l1 += std::llabs(block_path[i][static_cast<std::size_t>(j)] -
                             block_path[i - 1][static_cast<std::size_t>(j)]);
        if (l1 != 1) throw ConfigError("construct_crossing_path: blocks must be consecutive L1 neighbors");
    }
    // Goodness of every block on the path is a precondition, not something we
    // discover during the search.
    for (const Coord& x : block_path) {
        const BlockProcess bp = block_process(field, K, Box(x, x));
        if (bp.x[0] == 0) throw ConfigError("construct_crossing_path: block on path is not good");
    }

    std::unordered_set<std::uint64_t> union_blocks;
    for (const Coord& x : block_path) union_blocks.insert(pack_coord(x));
    auto in_union = [&](const Coord& c) { return union_blocks.count(pack_coord(lat.block_of(c))) != 0; };

    const Box& domain = field.domain;
    for (const Coord& x : block_path) {
        if (!domain.contains_box(lat.block_box(x)))
            throw CoverageError("construct_crossing_path: field does not cover block " +
                                lat.block_box(x).describe());
    }

    const Index bottom_level = cylinder.lo()[static_cast<std::size_t>(d - 1)];
    const Index top_level = cylinder.hi()[static_cast<std::size_t>(d - 1)];
    auto is_bottom = [&](const Coord& c) {
        return c[static_cast<std::size_t>(d - 1)] == bottom_level && cylinder.contains(c);
    };
    auto is_top = [&](const Coord& c) {
        return c[static_cast<std::size_t>(d - 1)] == top_level && cylinder.contains(c);
    };

    // BFS over open edges restricted to the block union, keyed by the ambient
    // domain's vertex indexing.
    std::vector<Index> parent(static_cast<std::size_t>(domain.vertex_count()), -2);
    std::deque<Index> queue;
    for (Index v = 0; v < domain.vertex_count(); ++v) {
        const Coord c = domain.vertex_coord(v);
        if (is_bottom(c) && in_union(c)) {
            parent[static_cast<std::size_t>(v)] = -1;
            queue.push_back(v);
        }
    }
    Index goal = -1;
    while (!queue.empty() && goal < 0) {
        const Index v = queue.front();
        queue.pop_front();
        const Coord c = domain.vertex_coord(v);
        if (is_top(c)) {
            goal = v;
            break;
        }
        for (int a = 0; a < d && goal < 0; ++a) {
            for (int sign : {+1, -1}) {
                Coord nb = c;
                nb[static_cast<std::size_t>(a)] += sign;
                if (!domain.contains(nb) || !in_union(nb)) continue;
                const Coord& base = sign > 0 ? c : nb;
                if (field.at(domain.edge_index(base, a)) != 1.0) continue;
                const Index w = domain.vertex_index(nb);
                if (parent[static_cast<std::size_t>(w)] != -2) continue;
                parent[static_cast<std::size_t>(w)] = v;
                queue.push_back(w);
            }
        }
    }
    if (goal < 0) return std::nullopt;

    CrossingPath path;
    for (Index v = goal; v != -1; v = parent[static_cast<std::size_t>(v)])
        path.vertices.push_back(domain.vertex_coord(v));
    std::reverse(path.vertices.begin(), path.vertices.end());
    return path;
}

Index count_block_disjoint_paths(const BlockProcess& bp, const Box& cylinder) {
    const int d = cylinder.dim();
    BlockLattice lat(d, bp.K);
    const Box rescaled = lat.rescale_region(cylinder);
    if (!bp.domain.contains_box(rescaled))
        throw ConfigError("count_block_disjoint_paths: block process does not cover the rescaled cylinder " +
                          rescaled.describe());

    Box bottom_face(cylinder.lo(), cylinder.lo());
    {
        Coord lo = cylinder.lo(), hi = cylinder.hi();
        hi[static_cast<std::size_t>(d - 1)] = lo[static_cast<std::size_t>(d - 1)];
        bottom_face = Box(lo, hi);
    }
    Box top_face(cylinder.hi(), cylinder.hi());
    {
        Coord lo = cylinder.lo(), hi = cylinder.hi();
        lo[static_cast<std::size_t>(d - 1)] = hi[static_cast<std::size_t>(d - 1)];
        top_face = Box(lo, hi);
    }
    const Box bottom_layer = lat.rescale_region(bottom_face);
    const Box top_layer = lat.rescale_region(top_face);

    // Vertex-split unit-capacity network over the good blocks of the rescaled
    // cylinder: in(x) -> out(x) cap 1, out(x) -> in(y) for L1 neighbors.
    const Index n = rescaled.vertex_count();
    const Index source = 2 * n, sink = 2 * n + 1;

    struct Arc {
        Index to;
        Index rev;
        long long cap;
    };
    std::vector<std::vector<Arc>> net(static_cast<std::size_t>(2 * n + 2));
    auto add = [&](Index from, Index to, long long cap) {
        net[static_cast<std::size_t>(from)].push_back({to, static_cast<Index>(net[static_cast<std::size_t>(to)].size()), cap});
        net[static_cast<std::size_t>(to)].push_back({from, static_cast<Index>(net[static_cast<std::size_t>(from)].size()) - 1, 0});
    };

    for (Index b = 0; b < n; ++b) {
        const Coord x = rescaled.vertex_coord(b);
        if (!bp.good(x)) continue;
        add(2 * b, 2 * b + 1, 1);
        for (int a = 0; a < d; ++a) {
            for (int sign : {+1, -1}) {
                Coord y = x;
                y[static_cast<std::size_t>(a)] += sign;
                if (!rescaled.contains(y) || !bp.good(y)) continue;
                add(2 * b + 1, 2 * rescaled.vertex_index(y), 1);
            }
        }
        if (bottom_layer.contains(x)) add(source, 2 * b, 1);
        if (top_layer.contains(x)) add(2 * b + 1, sink, 1);
    }

    // Dinic on the small rescaled network.
    std::vector<Index> level(net.size());
    std::vector<std::size_t> ptr(net.size());
    auto bfs = [&]() {
        std::fill(level.begin(), level.end(), Index{-1});
        std::deque<Index> q{source};
        level[static_cast<std::size_t>(source)] = 0;
        while (!q.empty()) {
            const Index v = q.front();
            q.pop_front();
            for (const Arc& a : net[static_cast<std::size_t>(v)]) {
                if (a.cap > 0 && level[static_cast<std::size_t>(a.to)] < 0) {
                    level[static_cast<std::size_t>(a.to)] = level[static_cast<std::size_t>(v)] + 1;
                    q.push_back(a.to);
                }
            }
        }
        return level[static_cast<std::size_t>(sink)] >= 0;
    };
    std::function<long long(Index, long long)> dfs = [&](Index v, long long limit) -> long long {
        if (v == sink || limit == 0) return limit;
        for (auto& i = ptr[static_cast<std::size_t>(v)]; i < net[static_cast<std::size_t>(v)].size(); ++i) {
            Arc& a = net[static_cast<std::size_t>(v)][i];
            if (a.cap <= 0 || level[static_cast<std::size_t>(a.to)] != level[static_cast<std::size_t>(v)] + 1)
                continue;
            const long long pushed = dfs(a.to, std::min(limit, a.cap));
            if (pushed > 0) {
                a.cap -= pushed;
                net[static_cast<std::size_t>(a.to)][static_cast<std::size_t>(a.rev)].cap += pushed;
                return pushed;
            }
        }
        return 0;
    };

    long long flow = 0;
    while (bfs()) {
        std::fill(ptr.begin(), ptr.end(), std::size_t{0});
        for (;;) {
            const long long pushed = dfs(source, std::numeric_limits<long long>::max());
            if (pushed == 0) break;
            flow += pushed;
        }
    }
    return static_cast<Index>(flow);
}

ExactEventProbability exact_event_probability(BoxEvent kind, const Box& box, double p, Index m) {
    const Index ne = box.edge_count();
    if (ne > 20)
        throw OracleSizeError("exact_event_probability: " + std::to_string(ne) + " edges exceeds the cap of 20");
    if (kind == BoxEvent::UniqueLargeCluster && (m < 1 || m > box.diameter()))
        throw ConfigError("exact_event_probability: invalid diameter threshold");

    const BoxShape shape(box);
    const Index nv = box.vertex_count();
    const int d = box.dim();

    ExactEventProbability out;
    out.total = Index{1} << ne;
    for (Index config = 0; config < out.total; ++config) {
        UnionFind uf(nv);
        for (Index e = 0; e < ne; ++e)
            if ((config >> e) & 1) uf.unite(shape.edge_ends[static_cast<std::size_t>(e)].first,
                                            shape.edge_ends[static_cast<std::size_t>(e)].second);
        bool holds = false;
        if (kind == BoxEvent::CrossingCluster) {
            std::vector<std::uint32_t> mask(static_cast<std::size_t>(nv), 0);
            for (Index v = 0; v < nv; ++v)
                mask[static_cast<std::size_t>(uf.find(v))] |= shape.face_mask[static_cast<std::size_t>(v)];
            for (Index v = 0; v < nv && !holds; ++v)
                if (uf.find(v) == v && mask[static_cast<std::size_t>(v)] == shape.full_mask()) holds = true;
        } else {
            std::vector<Coord> cmin(static_cast<std::size_t>(nv)), cmax(static_cast<std::size_t>(nv));
            for (Index v = 0; v < nv; ++v) {
                const Index r = uf.find(v);
                const Coord c = box.vertex_coord(v);
                auto& lo_r = cmin[static_cast<std::size_t>(r)];
                auto& hi_r = cmax[static_cast<std::size_t>(r)];
                if (lo_r.empty()) {
                    lo_r = c;
                    hi_r = c;
                } else {
                    for (int i = 0; i < d; ++i) {
                        lo_r[static_cast<std::size_t>(i)] =
                            std::min(lo_r[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(i)]);
                        hi_r[static_cast<std::size_t>(i)] =
                            std::max(hi_r[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(i)]);
                    }
                }
            }
            Index qualifying = 0;
            for (Index v = 0; v < nv; ++v) {
                if (uf.find(v) != v) continue;
                Index diam = 0;
                for (int i = 0; i < d; ++i)
                    diam = std::max(diam, cmax[static_cast<std::size_t>(v)][static_cast<std::size_t>(i)] -
                                              cmin[static_cast<std::size_t>(v)][static_cast<std::size_t>(i)]);
                if (diam >= m) ++qualifying;
            }
            holds = qualifying == 1;
        }
        if (holds) {
            ++out.satisfying;
            const int open = static_cast<int>(__builtin_popcountll(static_cast<unsigned long long>(config)));
            out.probability += std::pow(p, open) * std::pow(1 - p, static_cast<int>(ne) - open);
        }
    }
    return out;
}

}  // namespace cylflow
