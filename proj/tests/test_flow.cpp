#include <doctest.h>

#include <cmath>

#include "cylflow/flow.hpp"
#include "oracles.hpp"

using namespace cylflow;

namespace {

CylinderSpec spec2(Index k, Index m) { return CylinderSpec{2, {k}, m}; }

CapacityField field_from(const LatticeGraph& g, std::vector<double> values, CapacityDistribution dist) {
    CapacityField f;
    f.domain = g.box();
    f.values = std::move(values);
    f.prov.dist = std::move(dist);
    f.prov.derived = true;
    return f;
}

CapacityField constant_field(const LatticeGraph& g, double v) {
    return field_from(g, std::vector<double>(static_cast<std::size_t>(g.edge_count()), v),
                      CapacityDistribution::constant(v));
}

CapacityDistribution random_dist(oracles::TestRng& rng, bool allow_continuous) {
    const std::uint64_t pick = rng.below(allow_continuous ? 3 : 2);
    if (pick == 0) return CapacityDistribution::bernoulli(0.2 + 0.7 * rng.unit());
    if (pick == 1) {
        // atomic mixture on small decimals
        return CapacityDistribution::mixture({{0.0, 0.25}, {0.5, 0.25}, {1.0, 0.3}, {2.5, 0.2}});
    }
    return CapacityDistribution::mixture({{0.0, 0.3}}, UniformTail{0.5, 1.5}, 0.7);
}

}  // namespace

TEST_CASE("all-ones 3x4 box: three columns, value 3") {
    const LatticeGraph g = build_cylinder(spec2(2, 3));
    const FlowResult res = max_flow(g, constant_field(g, 1.0));
    CHECK(res.value == 3.0);
    REQUIRE(res.exact.has_value());
    CHECK(res.exact->num == 3);
    CHECK(res.exact->den == 1);
    CHECK(res.cut_value == 3.0);
    CHECK(res.min_cut.size() == 3);
    CHECK(is_cut(res.min_cut, g));
}

TEST_CASE("all-zero capacities: value 0, zero-value cut still separates") {
    const LatticeGraph g = build_cylinder(spec2(2, 3));
    const FlowResult res = max_flow(g, constant_field(g, 0.0));
    CHECK(res.value == 0.0);
    CHECK(res.cut_value == 0.0);
    CHECK(is_separating(res.min_cut, g));
    CHECK(is_cut(res.min_cut, g));
}

TEST_CASE("unit square with one dead vertical") {
    const LatticeGraph g = build_cylinder(spec2(1, 1));
    // edge order: axis 0 (horizontals at heights 0,1), then axis 1 (verticals at x=0,1)
    std::vector<double> caps(4, 1.0);
    REQUIRE(g.edge(2).axis == 1);
    caps[2] = 0.0;  // left vertical
    const auto field = field_from(g, caps, CapacityDistribution::bernoulli(0.5));
    const FlowResult res = max_flow(g, field);
    CHECK(res.value == 1.0);
    const BruteForceCut bf = brute_force_min_cut(g, field);
    CHECK(bf.value == 1.0);
}

TEST_CASE("duality and brute force on random instances") {
    oracles::TestRng rng(31);
    for (int iter = 0; iter < 60; ++iter) {
        const Index k = 1 + static_cast<Index>(rng.below(2));
        const Index m = 1 + static_cast<Index>(rng.below(2));
        const LatticeGraph g = build_cylinder(spec2(k, m));
        REQUIRE(g.edge_count() <= 25);
        const auto dist = random_dist(rng, true);
        const auto field = sample_capacities(g, dist, SeedSpec{rng.next(), 0});
        const FlowResult res = max_flow(g, field);
        const BruteForceCut bf = brute_force_min_cut(g, field);
        if (res.exact && bf.exact) {
            CHECK(res.exact->num * bf.exact->den == bf.exact->num * res.exact->den);
        } else {
            CHECK(res.value == doctest::Approx(bf.value).epsilon(1e-9));
        }
        CHECK(res.value == doctest::Approx(res.cut_value).epsilon(1e-9));
        // the attaining stream reproduces phi
        const StreamCheck check = validate_stream(g, field, res.stream);
        CHECK(check.feasible());
        CHECK(check.flow == doctest::Approx(res.value).epsilon(1e-9));
    }
}

TEST_CASE("bipartition brute force agrees with raw subset enumeration") {
    oracles::TestRng rng(37);
    for (int iter = 0; iter < 20; ++iter) {
        const LatticeGraph g = build_cylinder(spec2(1 + static_cast<Index>(rng.below(2)), 1));
        REQUIRE(g.edge_count() <= 20);
        const auto field = sample_capacities(g, random_dist(rng, true), SeedSpec{rng.next(), 0});
        CHECK(brute_force_min_cut(g, field).value ==
              doctest::Approx(oracles::subset_min_cut(g, field)).epsilon(1e-12));
    }
}

TEST_CASE("brute force refuses large instances") {
    const LatticeGraph g = build_cylinder(spec2(4, 4));
    CHECK_THROWS_AS(brute_force_min_cut(g, constant_field(g, 1.0)), OracleSizeError);
}

TEST_CASE("Menger on 0/1 fields: count equals packing oracle, packing validates") {
    oracles::TestRng rng(41);
    for (int iter = 0; iter < 40; ++iter) {
        const Index k = 1 + static_cast<Index>(rng.below(3));
        const Index m = 1 + static_cast<Index>(rng.below(3));
        const LatticeGraph g = build_cylinder(spec2(k, m));
        REQUIRE(g.edge_count() <= 24);
        const double p = 0.3 + 0.6 * rng.unit();
        const auto field = sample_capacities(g, CapacityDistribution::bernoulli(p), SeedSpec{rng.next(), 0});

        const DisjointPaths paths = count_disjoint_open_paths(g, field);
        const FlowResult res = max_flow(g, field);
        CHECK(static_cast<double>(paths.count) == res.value);
        CHECK(paths.count == oracles::max_packing_backtracking(g, field));

        // validate the packing: open, edge-disjoint, bottom-to-top, connected
        std::vector<char> used(static_cast<std::size_t>(g.edge_count()), 0);
        REQUIRE(paths.packing.vertices.size() == static_cast<std::size_t>(paths.count));
        for (std::size_t pi = 0; pi < paths.packing.vertices.size(); ++pi) {
            const auto& verts = paths.packing.vertices[pi];
            const auto& edges = paths.packing.edges[pi];
            REQUIRE(verts.size() == edges.size() + 1);
            CHECK(g.in_bottom(verts.front()));
            CHECK(g.in_top(verts.back()));
            for (std::size_t i = 0; i < edges.size(); ++i) {
                CHECK(field.at(edges[i]) == 1.0);
                CHECK(!used[static_cast<std::size_t>(edges[i])]);
                used[static_cast<std::size_t>(edges[i])] = 1;
                const auto [u, v] = g.edge_vertices(edges[i]);
                const bool forward = u == verts[i] && v == verts[i + 1];
                const bool backward = v == verts[i] && u == verts[i + 1];
                CHECK((forward || backward));
            }
        }
    }
}

TEST_CASE("disjoint path counting rejects non-binary fields") {
    const LatticeGraph g = build_cylinder(spec2(2, 2));
    CHECK_THROWS_AS(count_disjoint_open_paths(g, constant_field(g, 0.5)), ConfigError);
}

TEST_CASE("monotonicity: raising one capacity never lowers phi") {
    oracles::TestRng rng(43);
    for (int iter = 0; iter < 25; ++iter) {
        const LatticeGraph g = build_cylinder(spec2(2, 2));
        auto field = sample_capacities(g, random_dist(rng, true), SeedSpec{rng.next(), 0});
        const double before = max_flow(g, field).value;
        const Index e = static_cast<Index>(rng.below(static_cast<std::uint64_t>(g.edge_count())));
        field.values[static_cast<std::size_t>(e)] += 0.75;
        field.prov.derived = true;
        const double after = max_flow(g, field).value;
        CHECK(after >= before - 1e-12);
    }
}

TEST_CASE("slab bound dominates phi") {
    oracles::TestRng rng(47);
    for (int iter = 0; iter < 25; ++iter) {
        const LatticeGraph g = build_cylinder(spec2(3, 3));
        const auto field = sample_capacities(g, random_dist(rng, true), SeedSpec{rng.next(), 0});
        CHECK(max_flow(g, field).value <= slab_upper_bound(g, field) + 1e-9);
    }
}

TEST_CASE("validate_stream: zero stream, one column, violations") {
    const LatticeGraph g = build_cylinder(spec2(2, 3));
    const auto field = constant_field(g, 1.0);

    Stream zero;
    zero.magnitude.assign(static_cast<std::size_t>(g.edge_count()), 0.0);
    zero.forward.assign(static_cast<std::size_t>(g.edge_count()), 1);
    const StreamCheck ok = validate_stream(g, field, zero);
    CHECK(ok.feasible());
    CHECK(ok.flow == 0.0);

    // unit flow straight up the x=0 column
    Stream column = zero;
    for (Index e = 0; e < g.edge_count(); ++e) {
        const ZEdge z = g.edge(e);
        if (z.axis == 1 && z.base[0] == 0) column.magnitude[static_cast<std::size_t>(e)] = 1.0;
    }
    const StreamCheck col = validate_stream(g, field, column);
    CHECK(col.feasible());
    CHECK(col.flow == 1.0);

    // capacity violation: g(e) = t(e) + 1
    Stream over = zero;
    over.magnitude[0] = field.at(0) + 1.0;
    const StreamCheck bad = validate_stream(g, field, over);
    CHECK(!bad.feasible());
    CHECK(bad.kind == StreamCheck::Kind::Capacity);
    CHECK(bad.where == 0);
    CHECK(bad.excess == doctest::Approx(1.0));

    // conservation violation: inject flow on a single interior horizontal
    Stream lonely = zero;
    for (Index e = 0; e < g.edge_count(); ++e) {
        const ZEdge z = g.edge(e);
        if (z.axis == 0 && z.base[1] == 1) {
            lonely.magnitude[static_cast<std::size_t>(e)] = 1.0;
            break;
        }
    }
    const StreamCheck cons = validate_stream(g, field, lonely);
    CHECK(!cons.feasible());
    CHECK(cons.kind == StreamCheck::Kind::Conservation);
}

TEST_CASE("conservation is not required on the bottom face") {
    // A stream with unequal in/out at an F_0 vertex is legal: sources may
    // emit. Route one unit up the left column and one up the right column,
    // both fed laterally from the middle bottom vertex.
    const LatticeGraph g = build_cylinder(spec2(2, 1));
    const auto field = constant_field(g, 1.0);
    Stream s;
    s.magnitude.assign(static_cast<std::size_t>(g.edge_count()), 0.0);
    s.forward.assign(static_cast<std::size_t>(g.edge_count()), 1);
    for (Index e = 0; e < g.edge_count(); ++e) {
        const ZEdge z = g.edge(e);
        if (z.axis == 1 && (z.base[0] == 0 || z.base[0] == 2)) {
            s.magnitude[static_cast<std::size_t>(e)] = 1.0;  // both verticals up
        }
        if (z.axis == 0 && z.base[1] == 0) {
            s.magnitude[static_cast<std::size_t>(e)] = 1.0;
            // bottom horizontals: (0,0)-(1,0) flows left, (1,0)-(2,0) flows right
            s.forward[static_cast<std::size_t>(e)] = z.base[0] == 0 ? -1 : 1;
        }
    }
    const StreamCheck check = validate_stream(g, field, s);
    CHECK(check.feasible());
    CHECK(check.flow == 2.0);
}

TEST_CASE("exact arithmetic engages for atomic laws, fractions reconstruct") {
    const LatticeGraph g = build_cylinder(spec2(2, 2));
    const auto dist = CapacityDistribution::mixture({{1.0 / 3.0, 0.5}, {0.25, 0.5}});
    const auto field = sample_capacities(g, dist, SeedSpec{77, 0});
    const FlowResult res = max_flow(g, field);
    REQUIRE(res.exact.has_value());
    CHECK(res.exact->den == 12);  // lcm of 3 and 4
    CHECK(res.value == doctest::Approx(static_cast<double>(res.exact->num) / 12.0).epsilon(1e-15));
    const BruteForceCut bf = brute_force_min_cut(g, field);
    REQUIRE(bf.exact.has_value());
    CHECK(bf.exact->num == res.exact->num);
}

TEST_CASE("continuous laws run in floating point with tight duality") {
    const LatticeGraph g = build_cylinder(spec2(3, 3));
    const auto dist = CapacityDistribution::mixture({}, UniformTail{0.0, 1.0}, 1.0);
    const auto field = sample_capacities(g, dist, SeedSpec{78, 0});
    const FlowResult res = max_flow(g, field);
    CHECK(!res.exact.has_value());
    CHECK(res.value == doctest::Approx(res.cut_value).epsilon(1e-9));
}
