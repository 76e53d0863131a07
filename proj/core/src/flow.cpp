#include "cylflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace cylflow {

namespace {

// ---------------------------------------------------------------------------
// Dinic over an explicit arc list; arc i^1 is the reverse of arc i. Undirected
// lattice edges get capacity t on both arcs of the pair, the usual encoding
// that makes the net edge flow (rev_residual - fwd_residual) / 2.
// ---------------------------------------------------------------------------
template <typename Cap>
class Dinic {
  public:
    explicit Dinic(Index n) : head_(static_cast<std::size_t>(n)) {}

    Index add_arc(Index from, Index to, Cap cap, Cap rcap) {
        const Index id = static_cast<Index>(to_.size());
        to_.push_back(to);
        cap_.push_back(cap);
        head_[static_cast<std::size_t>(from)].push_back(id);
        to_.push_back(from);
        cap_.push_back(rcap);
        head_[static_cast<std::size_t>(to)].push_back(id + 1);
        return id;
    }

    Cap residual(Index arc) const { return cap_[static_cast<std::size_t>(arc)]; }

    Cap max_flow(Index s, Index t) {
        Cap total = 0;
        while (bfs(s, t)) {
            ptr_.assign(head_.size(), 0);
            for (;;) {
                const Cap pushed = dfs(s, t, std::numeric_limits<Cap>::max());
                if (pushed == Cap{0}) break;
                total += pushed;
            }
        }
        return total;
    }

    std::vector<char> reachable(Index s) const {
        std::vector<char> seen(head_.size(), 0);
        std::deque<Index> queue{s};
        seen[static_cast<std::size_t>(s)] = 1;
        while (!queue.empty()) {
            const Index v = queue.front();
            queue.pop_front();
            for (Index a : head_[static_cast<std::size_t>(v)]) {
                if (cap_[static_cast<std::size_t>(a)] > Cap{0}) {
                    const Index w = to_[static_cast<std::size_t>(a)];
                    if (!seen[static_cast<std::size_t>(w)]) {
                        seen[static_cast<std::size_t>(w)] = 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        return seen;
    }

  private:
    bool bfs(Index s, Index t) {
        level_.assign(head_.size(), -1);
        std::deque<Index> queue{s};
        level_[static_cast<std::size_t>(s)] = 0;
        while (!queue.empty()) {
            const Index v = queue.front();
            queue.pop_front();
            for (Index a : head_[static_cast<std::size_t>(v)]) {
                const Index w = to_[static_cast<std::size_t>(a)];
                if (cap_[static_cast<std::size_t>(a)] > Cap{0} && level_[static_cast<std::size_t>(w)] < 0) {
                    level_[static_cast<std::size_t>(w)] = level_[static_cast<std::size_t>(v)] + 1;
                    queue.push_back(w);
                }
            }
        }
        return level_[static_cast<std::size_t>(t)] >= 0;
    }

    Cap dfs(Index v, Index t, Cap limit) {
        if (v == t || limit == Cap{0}) return limit;
        for (auto& i = ptr_[static_cast<std::size_t>(v)]; i < head_[static_cast<std::size_t>(v)].size(); ++i) {
            const Index a = head_[static_cast<std::size_t>(v)][i];
            const Index w = to_[static_cast<std::size_t>(a)];
            if (level_[static_cast<std::size_t>(w)] != level_[static_cast<std::size_t>(v)] + 1) continue;
            const Cap room = cap_[static_cast<std::size_t>(a)];
            if (room <= Cap{0}) continue;
            const Cap pushed = dfs(w, t, std::min(limit, room));
            if (pushed > Cap{0}) {
                cap_[static_cast<std::size_t>(a)] -= pushed;
                cap_[static_cast<std::size_t>(a ^ 1)] += pushed;
                return pushed;
            }
        }
        return Cap{0};
    }

    std::vector<std::vector<Index>> head_;
    std::vector<Index> to_;
    std::vector<Cap> cap_;
    std::vector<Index> level_;
    std::vector<std::size_t> ptr_;
};

// ---------------------------------------------------------------------------
// Rationalization: map the distinct capacity values onto a common integer
// scale when each one reproduces its double exactly as a small fraction.
// ---------------------------------------------------------------------------
struct Fraction {
    long long num = 0;
    long long den = 1;
};

std::optional<Fraction> to_fraction(double v, long long max_den = 1'000'000'000LL) {
    if (v < 0 || !std::isfinite(v)) return std::nullopt;
    // Continued-fraction convergents; accept when the fraction reproduces the
    // double bit-exactly.
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double x = v;
    for (int iter = 0; iter < 64; ++iter) {
        const double fl = std::floor(x);
        if (fl > 9e17) return std::nullopt;
        const long long a = static_cast<long long>(fl);
        const long long p2 = a * p1 + p0;
        const long long q2 = a * q1 + q0;
        if (q2 > max_den || p2 < 0 || q2 <= 0) return std::nullopt;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if (static_cast<double>(p1) / static_cast<double>(q1) == v) return Fraction{p1, q1};
        const double frac = x - fl;
        if (frac <= 0) return std::nullopt;
        x = 1.0 / frac;
    }
    return std::nullopt;
}

struct ScaledCaps {
    std::vector<long long> caps;
    long long den = 1;
};

std::optional<ScaledCaps> rationalize(const std::vector<double>& values) {
    std::unordered_map<double, Fraction> distinct;
    long long den = 1;
    for (double v : values) {
        if (distinct.count(v)) continue;
        auto f = to_fraction(v);
        if (!f) return std::nullopt;
        distinct.emplace(v, *f);
        const long long g = std::gcd(den, f->den);
        if (den / g > std::numeric_limits<long long>::max() / f->den) return std::nullopt;
        den = den / g * f->den;
        if (den > 1'000'000'000'000LL) return std::nullopt;
    }
    ScaledCaps out;
    out.den = den;
    out.caps.reserve(values.size());
    long long total = 0;
    for (double v : values) {
        const Fraction& f = distinct.at(v);
        const long long scaled = f.num * (den / f.den);
        if (scaled > (std::numeric_limits<long long>::max() >> 3) - total) return std::nullopt;
        total += scaled;
        out.caps.push_back(scaled);
    }
    return out;
}

// Shared scaffolding: lattice vertices 0..V-1, super source V, super sink V+1.
template <typename Cap>
struct Network {
    Dinic<Cap> dinic;
    std::vector<Index> edge_arc;  // forward arc id per lattice edge
    Index source, sink;

    Network(const LatticeGraph& g, const std::vector<Cap>& caps, Cap inf)
        : dinic(g.vertex_count() + 2), source(g.vertex_count()), sink(g.vertex_count() + 1) {
        edge_arc.resize(static_cast<std::size_t>(g.edge_count()));
        for (Index e = 0; e < g.edge_count(); ++e) {
            const auto [u, v] = g.edge_vertices(e);
            const Cap t = caps[static_cast<std::size_t>(e)];
            edge_arc[static_cast<std::size_t>(e)] = dinic.add_arc(u, v, t, t);
        }
        for (Index v : g.bottom()) dinic.add_arc(source, v, inf, Cap{0});
        for (Index v : g.top()) dinic.add_arc(v, sink, inf, Cap{0});
    }
};

template <typename Cap>
std::int8_t edge_direction(const Dinic<Cap>& dinic, Index arc, Cap* magnitude) {
    // residual(fwd) = t - f, residual(rev) = t + f  =>  f = (rev - fwd) / 2
    const Cap f2 = dinic.residual(arc ^ 1) - dinic.residual(arc);
    if (f2 >= Cap{0}) {
        *magnitude = f2 / Cap{2};
        return 1;
    }
    *magnitude = (-f2) / Cap{2};
    return -1;
}

EdgeSet residual_cut(const LatticeGraph& g, const std::vector<char>& reach) {
    EdgeSet cut;
    for (Index e = 0; e < g.edge_count(); ++e) {
        const auto [u, v] = g.edge_vertices(e);
        if (reach[static_cast<std::size_t>(u)] != reach[static_cast<std::size_t>(v)]) cut.push_back(e);
    }
    return cut;
}

bool separates(const std::vector<char>& removed, const LatticeGraph& g) {
    std::vector<char> seen(static_cast<std::size_t>(g.vertex_count()), 0);
    std::deque<Index> queue;
    for (Index b : g.bottom()) {
        seen[static_cast<std::size_t>(b)] = 1;
        queue.push_back(b);
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

// Greedy minimality pruning in edge order. Only zero-capacity members can
// drop out: the value of any separating subset stays >= phi.
void prune_cut(EdgeSet& cut, const LatticeGraph& g) {
    std::vector<char> removed(static_cast<std::size_t>(g.edge_count()), 0);
    for (Index e : cut) removed[static_cast<std::size_t>(e)] = 1;
    EdgeSet kept;
    kept.reserve(cut.size());
    for (Index e : cut) {
        removed[static_cast<std::size_t>(e)] = 0;
        if (!separates(removed, g)) {
            removed[static_cast<std::size_t>(e)] = 1;
            kept.push_back(e);
        }
    }
    cut = std::move(kept);
}

template <typename Cap>
FlowResult solve(const LatticeGraph& g, const std::vector<Cap>& caps, Cap inf, double to_double_den) {
    Network<Cap> net(g, caps, inf);
    const Cap phi = net.dinic.max_flow(net.source, net.sink);
    const auto reach = net.dinic.reachable(net.source);

    FlowResult res;
    res.stream.magnitude.resize(static_cast<std::size_t>(g.edge_count()));
    res.stream.forward.resize(static_cast<std::size_t>(g.edge_count()));
    for (Index e = 0; e < g.edge_count(); ++e) {
        Cap mag;
        res.stream.forward[static_cast<std::size_t>(e)] =
            edge_direction(net.dinic, net.edge_arc[static_cast<std::size_t>(e)], &mag);
        res.stream.magnitude[static_cast<std::size_t>(e)] = static_cast<double>(mag) / to_double_den;
    }

    res.min_cut = residual_cut(g, reach);
    prune_cut(res.min_cut, g);

    Cap cut_value = 0;
    for (Index e : res.min_cut) cut_value += caps[static_cast<std::size_t>(e)];
    res.value = static_cast<double>(phi) / to_double_den;
    res.cut_value = static_cast<double>(cut_value) / to_double_den;

    if constexpr (std::is_same_v<Cap, long long>) {
        if (cut_value != phi)
            throw std::logic_error("max_flow: integer duality gap (phi=" + std::to_string(phi) +
                                   " cut=" + std::to_string(cut_value) + ")");
        res.exact = ExactValue{phi, static_cast<long long>(to_double_den)};
    } else {
        const double gap = std::abs(res.cut_value - res.value);
        if (gap > 1e-6 * std::max(1.0, res.value))
            throw std::logic_error("max_flow: duality gap " + std::to_string(gap));
    }
    return res;
}

void check_field(const LatticeGraph& g, const CapacityField& field) {
    if (!(field.domain == g.box()))
        throw ConfigError("capacity field domain " + field.domain.describe() + " does not match graph box " +
                          g.box().describe());
    for (double v : field.values)
        if (!(v >= 0) || !std::isfinite(v)) throw ConfigError("capacity field holds a negative or non-finite value");
}

}  // namespace

FlowResult max_flow(const LatticeGraph& g, const CapacityField& field) {
    check_field(g, field);
    if (field.prov.dist.atomic()) {
        if (auto scaled = rationalize(field.values)) {
            long long total = 0;
            for (long long c : scaled->caps) total += c;
            return solve<long long>(g, scaled->caps, total + 1, static_cast<double>(scaled->den));
        }
    }
    double total = 0;
    for (double v : field.values) total += v;
    return solve<double>(g, field.values, total + 1.0, 1.0);
}

EdgeSet min_cut(const LatticeGraph& g, const CapacityField& field) { return max_flow(g, field).min_cut; }

DisjointPaths count_disjoint_open_paths(const LatticeGraph& g, const CapacityField& field) {
    check_field(g, field);
    if (!field.zero_one())
        throw ConfigError("count_disjoint_open_paths: field is not 0/1-valued");

    std::vector<long long> caps(field.values.begin(), field.values.end());
    Network<long long> net(g, caps, static_cast<long long>(g.edge_count()) + 1);
    const long long phi = net.dinic.max_flow(net.source, net.sink);

    // Decompose the flow into paths. Per-vertex lists of used directed edges;
    // walks start at bottom vertices with positive emission and stop at the
    // first top vertex. Loop-erasure drops circulations on the way.
    std::vector<std::vector<std::pair<Index, Index>>> out_used(static_cast<std::size_t>(g.vertex_count()));
    std::vector<Index> emission(static_cast<std::size_t>(g.vertex_count()), 0);
    for (Index e = 0; e < g.edge_count(); ++e) {
        long long mag;
        const std::int8_t dir = edge_direction(net.dinic, net.edge_arc[static_cast<std::size_t>(e)], &mag);
        if (mag == 0) continue;
        auto [u, v] = g.edge_vertices(e);
        if (dir < 0) std::swap(u, v);
        out_used[static_cast<std::size_t>(u)].emplace_back(e, v);
        emission[static_cast<std::size_t>(u)] += 1;
        emission[static_cast<std::size_t>(v)] -= 1;
    }

    DisjointPaths result;
    result.count = static_cast<Index>(phi);
    std::vector<Index> on_path(static_cast<std::size_t>(g.vertex_count()), -1);
    for (Index s : g.bottom()) {
        Index starts = emission[static_cast<std::size_t>(s)];
        while (starts > 0) {
            --starts;
            std::vector<Index> pverts{s};
            std::vector<Index> pedges;
            on_path[static_cast<std::size_t>(s)] = 0;
            Index v = s;
            while (!g.in_top(v)) {
                auto& outs = out_used[static_cast<std::size_t>(v)];
                if (outs.empty())
                    throw std::logic_error("flow decomposition: stranded walk at vertex " + std::to_string(v));
                const auto [edge, next] = outs.back();
                outs.pop_back();
                const Index seen_at = on_path[static_cast<std::size_t>(next)];
                if (seen_at >= 0) {
                    // erase the loop
                    for (std::size_t i = static_cast<std::size_t>(seen_at) + 1; i < pverts.size(); ++i)
                        on_path[static_cast<std::size_t>(pverts[i])] = -1;
                    pverts.resize(static_cast<std::size_t>(seen_at) + 1);
                    pedges.resize(static_cast<std::size_t>(seen_at));
                    v = next;
                    continue;
                }
                pverts.push_back(next);
                pedges.push_back(edge);
                on_path[static_cast<std::size_t>(next)] = static_cast<Index>(pverts.size()) - 1;
                v = next;
            }
            for (Index u : pverts) on_path[static_cast<std::size_t>(u)] = -1;
            result.packing.vertices.push_back(std::move(pverts));
            result.packing.edges.push_back(std::move(pedges));
        }
    }
    if (static_cast<Index>(result.packing.vertices.size()) != result.count)
        throw std::logic_error("flow decomposition: path count mismatch");
    return result;
}

std::string StreamCheck::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Ok:
            os << "feasible, flow = " << flow;
            break;
        case Kind::Capacity:
            os << "capacity violated at edge " << where << " by " << excess;
            break;
        case Kind::Conservation:
            os << "conservation violated at vertex " << where << " by " << excess;
            break;
    }
    return os.str();
}

StreamCheck validate_stream(const LatticeGraph& g, const CapacityField& field, const Stream& s) {
    check_field(g, field);
    if (static_cast<Index>(s.magnitude.size()) != g.edge_count() ||
        static_cast<Index>(s.forward.size()) != g.edge_count())
        throw ConfigError("validate_stream: stream size does not match edge count");

    constexpr double kTol = 1e-9;
    StreamCheck check;
    for (Index e = 0; e < g.edge_count(); ++e) {
        const double mag = s.magnitude[static_cast<std::size_t>(e)];
        const double cap = field.at(e);
        if (mag < -kTol || mag > cap + kTol * std::max(1.0, cap)) {
            check.kind = StreamCheck::Kind::Capacity;
            check.where = e;
            check.excess = mag < 0 ? -mag : mag - cap;
            return check;
        }
    }

    // Net outflow per vertex under the stream's orientations.
    std::vector<double> net(static_cast<std::size_t>(g.vertex_count()), 0.0);
    for (Index e = 0; e < g.edge_count(); ++e) {
        const double mag = s.magnitude[static_cast<std::size_t>(e)];
        if (mag == 0) continue;
        auto [u, v] = g.edge_vertices(e);
        if (s.forward[static_cast<std::size_t>(e)] < 0) std::swap(u, v);
        net[static_cast<std::size_t>(u)] += mag;
        net[static_cast<std::size_t>(v)] -= mag;
    }
    for (Index v = 0; v < g.vertex_count(); ++v) {
        if (g.in_bottom(v) || g.in_top(v)) continue;
        if (std::abs(net[static_cast<std::size_t>(v)]) > kTol) {
            check.kind = StreamCheck::Kind::Conservation;
            check.where = v;
            check.excess = std::abs(net[static_cast<std::size_t>(v)]);
            return check;
        }
    }

    // Crossing flow: edges with exactly one endpoint in the top face, signed
    // towards the top.
    double flow = 0;
    for (Index e = 0; e < g.edge_count(); ++e) {
        const auto [u, v] = g.edge_vertices(e);
        const bool ut = g.in_top(u), vt = g.in_top(v);
        if (ut == vt) continue;
        const double mag = s.magnitude[static_cast<std::size_t>(e)];
        const bool towards_top = (s.forward[static_cast<std::size_t>(e)] >= 0) == vt;
        flow += towards_top ? mag : -mag;
    }
    check.flow = flow;
    return check;
}

BruteForceCut brute_force_min_cut(const LatticeGraph& g, const CapacityField& field) {
    check_field(g, field);
    if (g.edge_count() > 25)
        throw OracleSizeError("brute_force_min_cut: " + std::to_string(g.edge_count()) +
                              " edges exceeds the cap of 25");

    // Every separating edge set contains the crossing set of some vertex
    // bipartition (bottom on one side, top on the other), so the minimum over
    // bipartitions equals the minimum over separating sets.
    std::vector<Index> interior;
    std::vector<int> side(static_cast<std::size_t>(g.vertex_count()), -1);
    for (Index v : g.bottom()) side[static_cast<std::size_t>(v)] = 1;
    for (Index v : g.top()) side[static_cast<std::size_t>(v)] = 0;
    for (Index v = 0; v < g.vertex_count(); ++v)
        if (side[static_cast<std::size_t>(v)] < 0) interior.push_back(v);
    if (interior.size() > 25)
        throw OracleSizeError("brute_force_min_cut: too many interior vertices");

    const auto scaled = rationalize(field.values);

    auto crossing_value_double = [&]() {
        double value = 0;
        for (Index e = 0; e < g.edge_count(); ++e) {
            const auto [u, v] = g.edge_vertices(e);
            if (side[static_cast<std::size_t>(u)] != side[static_cast<std::size_t>(v)]) value += field.at(e);
        }
        return value;
    };
    auto crossing_value_exact = [&]() {
        long long value = 0;
        for (Index e = 0; e < g.edge_count(); ++e) {
            const auto [u, v] = g.edge_vertices(e);
            if (side[static_cast<std::size_t>(u)] != side[static_cast<std::size_t>(v)])
                value += scaled->caps[static_cast<std::size_t>(e)];
        }
        return value;
    };

    double best_d = std::numeric_limits<double>::infinity();
    long long best_i = std::numeric_limits<long long>::max();
    const std::uint64_t masks = 1ULL << interior.size();
    for (std::uint64_t m = 0; m < masks; ++m) {
        for (std::size_t i = 0; i < interior.size(); ++i)
            side[static_cast<std::size_t>(interior[i])] = (m >> i) & 1 ? 1 : 0;
        if (scaled) {
            best_i = std::min(best_i, crossing_value_exact());
        } else {
            best_d = std::min(best_d, crossing_value_double());
        }
    }

    BruteForceCut out;
    if (scaled) {
        out.exact = ExactValue{best_i, scaled->den};
        out.value = static_cast<double>(best_i) / static_cast<double>(scaled->den);
    } else {
        out.value = best_d;
    }
    return out;
}

double slab_upper_bound(const LatticeGraph& g, const CapacityField& field) {
    check_field(g, field);
    const int d = g.box().dim();
    const Index m = g.spec().height;
    std::vector<double> slab(static_cast<std::size_t>(m), 0.0);
    const Index offset = g.box().axis_edge_offset(d - 1);
    const Index count = g.box().axis_edge_count(d - 1);
    for (Index e = offset; e < offset + count; ++e) {
        const auto [base, axis] = g.box().edge_base_axis(e);
        slab[static_cast<std::size_t>(base[static_cast<std::size_t>(d - 1)])] += field.at(e);
    }
    double best = std::numeric_limits<double>::infinity();
    for (double v : slab) best = std::min(best, v);
    return best;
}

}  // namespace cylflow
