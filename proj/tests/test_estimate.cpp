#include <doctest.h>

#include <cmath>

#include "cylflow/estimate.hpp"
#include "oracles.hpp"

using namespace cylflow;

namespace {

ExperimentSpec base_spec() {
    ExperimentSpec s;
    s.d = 2;
    s.n_list = {4};
    s.height = HeightFn{HeightFn::Kind::Linear, 1.0, 2.0};
    s.dist = CapacityDistribution::bernoulli(0.9);
    s.epsilons = {0.1};
    s.replicates = 400;
    s.seed = 12345;
    s.threads = 1;
    return s;
}

}  // namespace

TEST_CASE("height functions") {
    const HeightFn constant{HeightFn::Kind::Constant, 6.0, 2.0};
    CHECK(constant(10, 2) == 6);
    const HeightFn linear{HeightFn::Kind::Linear, 2.0, 2.0};
    CHECK(linear(8, 2) == 16);
    const HeightFn power{HeightFn::Kind::Power, 1.5, 2.0};
    CHECK(power(4, 2) == 8);
    const HeightFn expo{HeightFn::Kind::Exponential, 5.0, 2.0};
    CHECK(expo(2, 2) == 1024);  // 2^(5*2)
    CHECK_THROWS_AS(expo(40, 2), ConfigError);  // overflow guard
    const HeightFn zero{HeightFn::Kind::Constant, 0.0, 2.0};
    CHECK_THROWS_AS(zero(4, 2), ConfigError);
}

TEST_CASE("alpha on degenerate laws") {
    ExperimentSpec s = base_spec();
    s.replicates = 50;

    // Bernoulli(1): phi = (n+1)^(d-1) = 5 deterministically at n = 4.
    s.dist = CapacityDistribution::bernoulli(1.0);
    s.epsilons = {1.0, 1.3};  // thresholds 4 and 5.2 against phi = 5
    const EstimationReport r1 = estimate_alpha(s);
    CHECK(r1.rows[0].alpha == 0.0);
    CHECK(r1.rows[0].censored);
    CHECK(r1.rows[1].alpha == 1.0);

    // Bernoulli(0): phi = 0, alpha = 1 for every eps >= 0.
    s.dist = CapacityDistribution::bernoulli(0.0);
    s.epsilons = {0.0, 0.5};
    const EstimationReport r0 = estimate_alpha(s);
    CHECK(r0.rows[0].alpha == 1.0);
    CHECK(r0.rows[1].alpha == 1.0);
}

TEST_CASE("common random numbers make alpha monotone in epsilon") {
    ExperimentSpec s = base_spec();
    s.dist = CapacityDistribution::bernoulli(0.55);
    s.epsilons = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    s.replicates = 300;
    const EstimationReport r = estimate_alpha(s);
    for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i - 1].alpha <= r.rows[i].alpha);
}

TEST_CASE("two seeds agree within overlapping 99% intervals") {
    ExperimentSpec s = base_spec();
    s.d = 2;
    s.n_list = {6};
    s.height = HeightFn{HeightFn::Kind::Constant, 6.0, 2.0};
    s.dist = CapacityDistribution::bernoulli(0.72);
    s.epsilons = {0.5};
    s.replicates = 4000;
    const EstimationReport a = estimate_alpha(s);
    s.seed = 99999;
    const EstimationReport b = estimate_alpha(s);
    CHECK(a.rows[0].ci_lo <= b.rows[0].ci_hi);
    CHECK(b.rows[0].ci_lo <= a.rows[0].ci_hi);
}

TEST_CASE("estimates are bit-identical across reruns and thread counts") {
    ExperimentSpec s = base_spec();
    s.replicates = 600;
    const EstimationReport a = estimate_alpha(s);
    const EstimationReport b = estimate_alpha(s);
    CHECK(a.rows[0].successes == b.rows[0].successes);
    CHECK(a.rows[0].alpha == b.rows[0].alpha);
    s.threads = 4;
    const EstimationReport c = estimate_alpha(s);
    CHECK(a.rows[0].successes == c.rows[0].successes);
}

TEST_CASE("subcritical negative control: alpha near 1, rate collapses") {
    ExperimentSpec s = base_spec();
    s.n_list = {8};
    s.dist = CapacityDistribution::bernoulli(0.3);  // below p_c(2) = 1/2
    s.epsilons = {0.1};
    s.replicates = 2000;
    const EstimationReport r = estimate_alpha(s);
    // true alpha here is ~0.989 (open crossings at p=0.3 survive with ~1.1%)
    CHECK(r.rows[0].alpha >= 0.97);
    CHECK(r.rows[0].rate < 0.05);
}

TEST_CASE("censored rows report the one-sided rate bound") {
    ExperimentSpec s = base_spec();
    s.dist = CapacityDistribution::bernoulli(1.0);
    s.epsilons = {0.5};
    s.replicates = 1000;
    const EstimationReport r = estimate_alpha(s);
    REQUIRE(r.rows[0].censored);
    const WilsonInterval ci = wilson_interval(0, 1000);
    CHECK(r.rows[0].rate == doctest::Approx(-std::log(ci.hi) / 4.0).epsilon(1e-12));
    CHECK(std::isfinite(r.rows[0].rate));
}

TEST_CASE("wilson interval basics") {
    const WilsonInterval mid = wilson_interval(50, 100);
    CHECK(mid.lo > 0.35);
    CHECK(mid.hi < 0.65);
    CHECK(mid.lo < 0.5);
    CHECK(mid.hi > 0.5);
    const WilsonInterval zero = wilson_interval(0, 100);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi > 0.0);
    CHECK(zero.hi < 0.1);
    const WilsonInterval one = wilson_interval(100, 100);
    CHECK(one.hi == 1.0);
    CHECK(one.lo < 1.0);
}

TEST_CASE("chebyshev exponent collapse cases") {
    BoundParams bp;
    bp.p = 0.5;
    bp.epsilon = 0.3;
    bp.d = 2;
    bp.c = 4.0;
    bp.rho = 0.25;

    bp.lambda = 0.0;  // ln(p + (1-p)) = 0
    CHECK(chebyshev_exponent(bp) == doctest::Approx(-0.25 - std::log(4.0)).epsilon(1e-12));

    bp.lambda = 2.0;
    bp.p = 1.0;  // moment term vanishes
    CHECK(chebyshev_exponent(bp) ==
          doctest::Approx(-0.25 - std::log(4.0) + 2.0 * 0.7).epsilon(1e-12));
}

TEST_CASE("lambda and p0 selection") {
    // eps = 0, c = e: lambda = 3, p0 = 1 - (e-1)/(e^3-1)
    const LambdaP0 lp = choose_lambda_p0(0.0, std::exp(1.0));
    CHECK(lp.lambda == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(lp.p0 == doctest::Approx(0.9099694268296196).epsilon(1e-12));
    // substituting p0 back saturates the constraint: ln(p0 + (1-p0) e^l) = ln c
    const double mgf = std::log(lp.p0 + (1 - lp.p0) * std::exp(lp.lambda));
    CHECK(mgf == doctest::Approx(1.0).epsilon(1e-12));

    // monotone in eps towards the degenerate corner
    const LambdaP0 tight = choose_lambda_p0(0.9, std::exp(1.0));
    CHECK(tight.lambda > lp.lambda);
    CHECK(tight.p0 > lp.p0);
    CHECK(tight.p0 < 1.0);

    // c -> 1+: lambda -> 0 and p0 -> 2/3, the limit of (e^l - c)/(e^l - 1)
    // under lambda = 3 ln c
    const LambdaP0 loose = choose_lambda_p0(0.0, 1.0 + 1e-9);
    CHECK(loose.lambda < 1e-8);
    CHECK(loose.p0 == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("bracket >= ln c - rho for all p >= p0 (spot grid)") {
    for (double eps : {0.0, 0.2, 0.5, 0.9}) {
        for (double c : {1.5, 4.0, 40.0}) {
            const LambdaP0 lp = choose_lambda_p0(eps, c);
            CHECK(lp.p0 == doctest::Approx(1 - lp.q0));
            for (double t : {1.0, 0.7, 0.0}) {
                const double q = lp.q0 * t;  // p = 1 - q >= p0
                BoundParams bp;
                bp.p = std::min(1 - q, 1.0);
                bp.one_minus_p = q;
                bp.epsilon = eps;
                bp.lambda = lp.lambda;
                bp.c = c;
                bp.rho = 0.125;
                CHECK(chebyshev_exponent(bp) >= std::log(c) - bp.rho - 1e-9);
            }
        }
    }
}

TEST_CASE("diamond set counts: seed, neighbors, growth") {
    const AnimalCount d2 = count_diamond_sets(3, 2);
    CHECK(d2.counts[0] == 1);   // just {e0}
    CHECK(d2.counts[1] == 6);   // one per diamond neighbor
    CHECK(d2.counts[2] == 33);  // matches a naive subset filter over a window
    CHECK(d2.counts[2] <= d2.counts[1] * 12);

    const AnimalCount d2full = count_diamond_sets(6, 2);
    CHECK(d2full.counts[5] > d2full.counts[4]);
    CHECK(d2full.growth > 1.0);
    CHECK(d2full.growth < 40.0);  // bounded per-element growth

    const AnimalCount d3 = count_diamond_sets(4, 3);
    CHECK(d3.counts[0] == 1);
    CHECK(d3.counts[1] == static_cast<Index>(diamond_neighbors(ZEdge{{0, 0, 0}, 2}).size()));

    CHECK_THROWS_AS(count_diamond_sets(7, 2), OracleSizeError);
    CHECK_THROWS_AS(count_diamond_sets(5, 3), OracleSizeError);
    CHECK_THROWS_AS(count_diamond_sets(3, 4), ConfigError);
}

TEST_CASE("lattice animal counts match the known small values") {
    const AnimalCount d2 = count_lattice_animals(5, 2);
    // fixed polyominoes through a marked cell: s * A(s) with A = 1,2,6,19,63
    CHECK(d2.counts == std::vector<Index>{1, 4, 18, 76, 315});
    const AnimalCount d3 = count_lattice_animals(3, 3);
    CHECK(d3.counts[0] == 1);
    CHECK(d3.counts[1] == 6);   // 2d neighbors
    CHECK(d3.counts[2] == 45);  // 3 * A(3, d=3) = 3 * 15
    CHECK_THROWS_AS(count_lattice_animals(9, 2), OracleSizeError);
}

TEST_CASE("zero flow bound: degenerate and reference values") {
    CHECK(zero_flow_bound(2, 10, 0.0, 2).value == 0.0);
    CHECK(zero_flow_bound(2, 10, 1.0, 2).value == 1.0);

    // d=2, n=2, p=1/2, h=1024: bound = (1 - 0.5^3)^1024 = 0.875^1024
    const ZeroFlowBound b = zero_flow_bound(2, 1024, 0.5, 2);
    const long double direct = 1024.0L * std::log10(0.875L);
    CHECK(b.log_value / std::log(10.0) == doctest::Approx(static_cast<double>(direct)).epsilon(1e-12));
    CHECK(b.log_value / std::log(10.0) == doctest::Approx(-59.3837).epsilon(1e-4));
    CHECK(b.value == doctest::Approx(std::exp(b.log_value)));
}

TEST_CASE("zero flow bound monotone in p and n, decreasing in h") {
    const double base = zero_flow_bound(3, 16, 0.4, 2).log_value;
    CHECK(zero_flow_bound(3, 16, 0.5, 2).log_value > base);
    CHECK(zero_flow_bound(4, 16, 0.4, 2).log_value > base);
    CHECK(zero_flow_bound(3, 32, 0.4, 2).log_value < base);
}

TEST_CASE("epsilon0 thresholds") {
    CHECK(epsilon0_renorm(2, 2) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(epsilon0_renorm(8, 3) == doctest::Approx(1.0 / 128.0).epsilon(1e-15));
    CHECK(epsilon0_renorm(8, 2, 0.5) == doctest::Approx(1.0 / 32.0).epsilon(1e-15));
    CHECK_THROWS_AS(epsilon0_renorm(7, 2), ConfigError);
}

TEST_CASE("rescaled-lattice bound algebra") {
    // with lambda = 6*3^d ln c' and delta at its threshold, the bracket is
    // >= ln c' whenever eps <= 1/(2 K^(d-1)) and n >= K
    for (double c_prime : {1.5, 3.0, 10.0}) {
        for (int d : {2, 3}) {
            const double lambda = choose_lambda_renorm(c_prime, d);
            CHECK(lambda / (2 * std::pow(3.0, d)) >= 3 * std::log(c_prime) - 1e-12);
            const double delta = std::exp(log_delta_threshold(lambda, c_prime));
            for (Index K : {4, 8}) {
                for (Index n : {4 * K, 9 * K}) {
                    RenormBoundParams rp;
                    rp.d = d;
                    rp.c_prime = c_prime;
                    rp.lambda = lambda;
                    rp.delta_K = delta;
                    rp.epsilon = epsilon0_renorm(K, d);
                    rp.n = n;
                    rp.K = K;
                    CHECK(renorm_exponent(rp) >= std::log(c_prime) - 1e-9);
                }
            }
        }
    }
    // closing bound in log space
    const double log_bound = renorm_bound_log(16, 16, 8, 2, 3.0);
    CHECK(log_bound ==
          doctest::Approx(2 * std::log(3.0) + std::log(16.0) - std::log(8.0) - 2 * std::log(3.0)));
}

TEST_CASE("experiment validation") {
    ExperimentSpec s = base_spec();
    s.n_list = {4, 4};
    CHECK_THROWS_AS(estimate_alpha(s), ConfigError);
    s = base_spec();
    s.epsilons = {-0.1};
    CHECK_THROWS_AS(estimate_alpha(s), ConfigError);
    s = base_spec();
    s.replicates = 0;
    CHECK_THROWS_AS(estimate_alpha(s), ConfigError);
}
