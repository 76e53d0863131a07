#include "cylflow/estimate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include "cylflow/flow.hpp"
#include "cylflow/parallel.hpp"

namespace cylflow {

namespace {

double ipow(double base, int exp) {
    double r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

Index ipow_i(Index base, int exp) {
    Index r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

}  // namespace

Index HeightFn::operator()(Index n, int d) const {
    double h = 0;
    switch (kind) {
        case Kind::Constant:
            h = a;
            break;
        case Kind::Linear:
            h = a * static_cast<double>(n);
            break;
        case Kind::Power:
            h = std::pow(static_cast<double>(n), a);
            break;
        case Kind::Exponential:
            h = std::pow(b, a * ipow(static_cast<double>(n), d - 1));
            break;
    }
    const double rounded = std::round(h);
    if (!(rounded >= 1)) throw ConfigError("height function yields h < 1 at n = " + std::to_string(n));
    // Simulation cap; the closed-form bound calculators handle taller boxes.
    if (rounded > 16384) throw ConfigError("height function yields h > 16384 at n = " + std::to_string(n) +
                                           "; too tall to simulate");
    return static_cast<Index>(rounded);
}

std::string HeightFn::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Constant:
            os << "h=" << a;
            break;
        case Kind::Linear:
            os << "h=" << a << "*n";
            break;
        case Kind::Power:
            os << "h=n^" << a;
            break;
        case Kind::Exponential:
            os << "h=" << b << "^(" << a << "*n^(d-1))";
            break;
    }
    return os.str();
}

void ExperimentSpec::validate() const {
    if (d < 2) throw ConfigError("experiment: d must be >= 2");
    if (n_list.empty()) throw ConfigError("experiment: empty n list");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 1) throw ConfigError("experiment: n must be >= 1");
        if (i > 0 && n_list[i] <= n_list[i - 1]) throw ConfigError("experiment: n list must be increasing");
    }
    if (epsilons.empty()) throw ConfigError("experiment: empty epsilon list");
    for (double e : epsilons)
        if (e < 0) throw ConfigError("experiment: epsilon must be >= 0");
    if (replicates < 1) throw ConfigError("experiment: replicates must be >= 1");
    if (threads < 1) throw ConfigError("experiment: threads must be >= 1");
}

WilsonInterval wilson_interval(Index successes, Index trials, double z) {
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1 + z2 / n;
    const double center = phat + z2 / (2 * n);
    const double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n));
    WilsonInterval w;
    w.lo = std::max(0.0, (center - half) / denom);
    w.hi = std::min(1.0, (center + half) / denom);
    return w;
}

EstimationReport estimate_alpha(const ExperimentSpec& spec) {
    spec.validate();
    const auto t0 = std::chrono::steady_clock::now();

    EstimationReport report;
    report.rate_floor = spec.rate_floor;

    for (Index n : spec.n_list) {
        const Index h = spec.height(n, spec.d);
        CylinderSpec cyl;
        cyl.d = spec.d;
        cyl.sides.assign(static_cast<std::size_t>(spec.d - 1), n);
        cyl.height = h;
        const LatticeGraph g = build_cylinder(cyl);

        // One solve per replicate; every epsilon reuses the same phi values
        // (common random numbers across the epsilon list).
        const auto phis = run_indexed(spec.replicates, spec.threads, [&](Index r) {
            const CapacityField field =
                sample_capacities(g, spec.dist, SeedSpec{spec.seed, static_cast<std::uint64_t>(r)});
            return max_flow(g, field).value;
        });

        const double scale = static_cast<double>(ipow_i(n, spec.d - 1));
        for (double eps : spec.epsilons) {
            AlphaEntry row;
            row.n = n;
            row.h = h;
            row.epsilon = eps;
            row.replicates = spec.replicates;
            const double threshold = eps * scale;
            for (double phi : phis)
                if (phi <= threshold) ++row.successes;
            row.alpha = static_cast<double>(row.successes) / static_cast<double>(spec.replicates);
            const WilsonInterval ci = wilson_interval(row.successes, spec.replicates);
            row.ci_lo = ci.lo;
            row.ci_hi = ci.hi;
            if (row.successes == 0) {
                row.censored = true;
                row.rate = -std::log(ci.hi) / scale;  // one-sided lower bound, never "infinity"
            } else {
                row.rate = -std::log(row.alpha) / scale;
            }
            report.rows.push_back(row);
        }
    }

    report.rate_above_floor = true;
    for (const AlphaEntry& row : report.rows)
        if (row.rate < spec.rate_floor) report.rate_above_floor = false;

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

EstimationReport rate_sweep(const ExperimentSpec& spec) { return estimate_alpha(spec); }

void BoundParams::validate() const {
    if (p < 0 || p > 1) throw ConfigError("bound: p must lie in [0,1]");
    if (epsilon < 0 || epsilon >= 1) throw ConfigError("bound: epsilon must lie in [0,1)");
    if (lambda < 0) throw ConfigError("bound: lambda must be >= 0");
    if (c <= 1) throw ConfigError("bound: c must be > 1");
    if (one_minus_p && (*one_minus_p < 0 || *one_minus_p > 1))
        throw ConfigError("bound: 1-p must lie in [0,1]");
}

namespace {

// ln(p + (1-p) e^lambda) = log1p(q (e^lambda - 1)) with q = 1-p: exact at
// q = 0 and free of cancellation as long as q e^lambda stays finite.
double log_mgf(double q, double lambda) {
    const double em1 = std::expm1(lambda);
    if (std::isfinite(em1) && std::isfinite(q * em1)) return std::log1p(q * em1);
    if (q <= 0) return 0.0;
    return lambda + std::log(q) + std::log1p((1 - q) * std::exp(-lambda) / q);
}

}  // namespace

double chebyshev_exponent(const BoundParams& bp) {
    bp.validate();
    const double q = bp.one_minus_p ? *bp.one_minus_p : 1 - bp.p;
    return -bp.rho - std::log(bp.c) + bp.lambda * (1 - bp.epsilon) - log_mgf(q, bp.lambda);
}

LambdaP0 choose_lambda_p0(double epsilon, double c) {
    if (epsilon < 0 || epsilon >= 1) throw ConfigError("choose_lambda_p0: epsilon must lie in [0,1)");
    if (c <= 1) throw ConfigError("choose_lambda_p0: c must be > 1");
    LambdaP0 out;
    out.lambda = 3 * std::log(c) / (1 - epsilon);
    // q0 = (c-1)/(e^l - 1) saturates ln(p0 + q0 e^l) = ln c by construction.
    const double em1 = std::expm1(out.lambda);
    out.q0 = std::isfinite(em1) ? (c - 1) / em1 : 0.0;
    out.p0 = std::clamp(1 - out.q0, 0.0, std::nextafter(1.0, 0.0));
    return out;
}

namespace {

// Enumerates connected subsets of an implicit graph containing a seed node,
// each exactly once: candidates are consumed in order, and a candidate
// skipped at one level is banned below it.
template <typename Key, typename NeighborsFn>
void enumerate_connected(std::vector<Key>& set, std::vector<Key> frontier, std::set<Key> banned,
                         std::size_t max_size, const NeighborsFn& neighbors,
                         std::vector<Index>& counts) {
    counts[set.size() - 1] += 1;
    if (set.size() == max_size) return;
    while (!frontier.empty()) {
        const Key next = frontier.front();
        frontier.erase(frontier.begin());
        std::vector<Key> extended = frontier;
        std::set<Key> member(set.begin(), set.end());
        for (const Key& nb : neighbors(next)) {
            if (member.count(nb) || banned.count(nb)) continue;
            if (std::find(extended.begin(), extended.end(), nb) != extended.end()) continue;
            if (std::find(frontier.begin(), frontier.end(), nb) != frontier.end()) continue;
            extended.push_back(nb);
        }
        set.push_back(next);
        enumerate_connected(set, std::move(extended), banned, max_size, neighbors, counts);
        set.pop_back();
        banned.insert(next);
    }
}

template <typename Key, typename NeighborsFn>
AnimalCount count_connected_sets(const Key& seed, Index s, const NeighborsFn& neighbors) {
    std::vector<Index> counts(static_cast<std::size_t>(s), 0);
    std::vector<Key> set{seed};
    std::vector<Key> frontier = neighbors(seed);
    std::set<Key> banned{seed};
    // the seed's neighbor list is already deduplicated and ordered
    counts.assign(static_cast<std::size_t>(s), 0);
    enumerate_connected(set, std::move(frontier), std::move(banned), static_cast<std::size_t>(s),
                        neighbors, counts);
    AnimalCount out;
    out.counts = std::move(counts);
    out.growth = std::pow(static_cast<double>(out.counts.back()), 1.0 / static_cast<double>(s));
    return out;
}

}  // namespace

AnimalCount count_diamond_sets(Index s, int d) {
    if (d != 2 && d != 3) throw ConfigError("count_diamond_sets: d must be 2 or 3");
    const Index cap = d == 2 ? 6 : 4;
    if (s < 1 || s > cap)
        throw OracleSizeError("count_diamond_sets: size " + std::to_string(s) + " exceeds the cap of " +
                              std::to_string(cap) + " in d=" + std::to_string(d));
    ZEdge seed;
    seed.base.assign(static_cast<std::size_t>(d), 0);
    seed.axis = d - 1;  // the vertical edge at the origin
    auto neighbors = [](const ZEdge& e) { return diamond_neighbors(e); };
    return count_connected_sets(seed, s, neighbors);
}

AnimalCount count_lattice_animals(Index s, int d) {
    if (d < 1) throw ConfigError("count_lattice_animals: d must be >= 1");
    const Index cap = d <= 2 ? 8 : 6;
    if (s < 1 || s > cap)
        throw OracleSizeError("count_lattice_animals: size " + std::to_string(s) + " exceeds the cap of " +
                              std::to_string(cap) + " in d=" + std::to_string(d));
    Coord seed(static_cast<std::size_t>(d), 0);
    auto neighbors = [d](const Coord& c) {
        std::vector<Coord> out;
        for (int a = 0; a < d; ++a) {
            for (int sign : {-1, +1}) {
                Coord nb = c;
                nb[static_cast<std::size_t>(a)] += sign;
                out.push_back(std::move(nb));
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    return count_connected_sets(seed, s, neighbors);
}

ZeroFlowBound zero_flow_bound(Index n, Index h, double p, int d) {
    if (n < 1 || h < 1 || d < 2) throw ConfigError("zero_flow_bound: need n >= 1, h >= 1, d >= 2");
    if (p < 0 || p > 1) throw ConfigError("zero_flow_bound: p must lie in [0,1]");
    ZeroFlowBound out;
    if (p == 0) {
        out.log_value = -std::numeric_limits<double>::infinity();
        out.value = 0;
        return out;
    }
    const double columns = ipow(static_cast<double>(n + 1), d - 1);  // exact count, not n^(d-1)
    // log of 1 - (1-p)^columns, all in log space
    const double log_q_pow = columns * std::log1p(-p);  // -inf when p = 1
    const double log_level = std::log1p(-std::exp(log_q_pow));
    out.log_value = static_cast<double>(h) * log_level;
    out.value = std::exp(out.log_value);
    return out;
}

double epsilon0_renorm(Index K, int d, double eta) {
    if (K < 2 || K % 2 != 0) throw ConfigError("epsilon0_renorm: K must be a positive even integer");
    if (d < 2) throw ConfigError("epsilon0_renorm: d must be >= 2");
    if (eta <= 0) throw ConfigError("epsilon0_renorm: eta must be > 0");
    return eta / (2.0 * ipow(static_cast<double>(K), d - 1));
}

double choose_lambda_renorm(double c_prime, int d) {
    if (c_prime <= 1) throw ConfigError("choose_lambda_renorm: c' must be > 1");
    return 6.0 * ipow(3.0, d) * std::log(c_prime);
}

double log_delta_threshold(double lambda, double c_prime) {
    if (c_prime <= 1 || lambda <= 0) throw ConfigError("log_delta_threshold: need c' > 1 and lambda > 0");
    // delta_max = (c'-1) / (e^lambda - 1)
    const double log_em1 = lambda < 700 ? std::log(std::expm1(lambda)) : lambda;
    return std::log(c_prime - 1) - log_em1;
}

double renorm_exponent(const RenormBoundParams& rp) {
    if (rp.c_prime <= 1) throw ConfigError("renorm_exponent: c' must be > 1");
    if (rp.K < 2 || rp.K % 2 != 0) throw ConfigError("renorm_exponent: K must be even and >= 2");
    if (rp.delta_K < 0 || rp.delta_K > 1) throw ConfigError("renorm_exponent: delta_K must lie in [0,1]");
    const double u = std::floor(ipow(static_cast<double>(rp.n) / static_cast<double>(rp.K), rp.d - 1));
    if (u < 1) throw ConfigError("renorm_exponent: rescaled cut bound u < 1; increase n/K");
    const double surface = ipow(static_cast<double>(rp.n), rp.d - 1);
    const double penalty = log_mgf(rp.delta_K, rp.lambda);  // ln(1 + delta (e^l - 1))
    return -std::log(rp.c_prime) + rp.lambda / ipow(3.0, rp.d) * (1 - rp.epsilon * surface / u) - penalty;
}

double renorm_bound_log(Index n, Index h, Index K, int d, double c_prime) {
    if (c_prime <= 1) throw ConfigError("renorm_bound_log: c' must be > 1");
    if (K < 2 || K % 2 != 0) throw ConfigError("renorm_bound_log: K must be even and >= 2");
    const double u = std::floor(ipow(static_cast<double>(n) / static_cast<double>(K), d - 1));
    return d * std::log(3.0) + std::log(static_cast<double>(h)) - std::log(static_cast<double>(K)) -
           u * std::log(c_prime);
}

}  // namespace cylflow
