#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cylflow/capacity.hpp"
#include "cylflow/lattice.hpp"

namespace cylflow {

// Height of the cylinder as a function of the side n.
struct HeightFn {
    enum class Kind { Constant, Linear, Power, Exponential };
    Kind kind = Kind::Linear;
    double a = 1;  // Constant: value; Linear: factor; Power: exponent; Exponential: rate r
    double b = 2;  // Exponential: base, h(n) = round(base^(r * n^(d-1)))

    Index operator()(Index n, int d) const;  // >= 1, throws ConfigError on overflow
    std::string describe() const;
};

struct ExperimentSpec {
    int d = 2;
    std::vector<Index> n_list;      // increasing sides
    HeightFn height;
    CapacityDistribution dist = CapacityDistribution::bernoulli(0.5);
    std::vector<double> epsilons;   // all >= 0
    Index replicates = 1000;
    std::uint64_t seed = 0;
    int threads = 1;
    double rate_floor = 0.05;

    void validate() const;
};

struct AlphaEntry {
    Index n = 0;
    Index h = 0;
    double epsilon = 0;
    Index replicates = 0;
    Index successes = 0;     // replicates with phi <= eps * n^(d-1)
    double alpha = 0;        // successes / replicates
    double ci_lo = 0, ci_hi = 1;  // 99% Wilson interval for alpha
    bool censored = false;   // alpha == 0: rate is a one-sided lower bound
    double rate = 0;         // -ln(alpha)/n^(d-1), or -ln(ci_hi)/n^(d-1) when censored
};

struct EstimationReport {
    std::vector<AlphaEntry> rows;  // ordered by (n, epsilon)
    double rate_floor = 0;
    bool rate_above_floor = false;
    double wall_seconds = 0;       // console diagnostics only, never serialized
};

// Monte Carlo estimate of alpha(eps) = P[phi <= eps n^(d-1)] per (n, eps).
// One field per replicate is shared across every epsilon (common random
// numbers), so alpha is monotone in eps within a run by construction.
EstimationReport estimate_alpha(const ExperimentSpec& spec);

// estimate_alpha plus the floor verdict over the sweep: every row's rate (or
// censored lower bound) must reach spec.rate_floor.
EstimationReport rate_sweep(const ExperimentSpec& spec);

struct BoundParams {
    double p = 1;       // Bernoulli parameter
    double epsilon = 0; // in [0,1)
    int d = 2;
    double lambda = 1;  // > 0
    double c = 2;       // diamond-animal growth constant, > 1
    double rho = 0;     // ln h(n) / n^(d-1)
    // 1 - p at full precision. Near the p0 threshold the complement is far
    // below the resolution of p itself; set this to keep the moment term
    // exact there. Derived from p when absent.
    std::optional<double> one_minus_p;

    void validate() const;
};

// The exponential-Chebyshev exponent bracket
//   -rho - ln c + lambda (1 - eps) - ln(p + (1-p) e^lambda).
// A positive value certifies decay of alpha at surface-order rate >= bracket.
double chebyshev_exponent(const BoundParams& bp);

struct LambdaP0 {
    double lambda = 0;  // 3 ln c / (1 - eps)
    double p0 = 0;      // solution of p + (1-p) e^lambda = c, clamped to [0,1)
    double q0 = 0;      // 1 - p0 = (c-1)/(e^lambda - 1), computed without cancellation
};

// Smallest lambda with lambda (1 - eps) >= 3 ln c, and the threshold p0 above
// which the bracket is >= ln c - rho.
LambdaP0 choose_lambda_p0(double epsilon, double c);

struct AnimalCount {
    std::vector<Index> counts;  // counts[s-1] = sets of size s containing the seed
    double growth = 0;          // counts.back() ^ (1 / s_max)
};

// Exact number of diamond-connected edge sets of each size 1..s containing
// the vertical edge at the origin. Caps: s <= 6 in d=2, s <= 4 in d=3.
AnimalCount count_diamond_sets(Index s, int d);

// Exact number of L1-connected vertex sets (lattice animals) of each size
// 1..s containing the origin. Caps: s <= 8 in d=2, s <= 6 in d=3.
AnimalCount count_lattice_animals(Index s, int d);

struct ZeroFlowBound {
    double log_value = 0;  // natural log of the bound
    double value = 0;
};

// P[phi != 0] <= [1 - (1-p)^((n+1)^(d-1))]^h, evaluated in log space. Uses
// the exact column count (n+1)^(d-1); the asymptotic convention drops the +1.
ZeroFlowBound zero_flow_bound(Index n, Index h, double p, int d);

// Epsilon threshold of the rescaled-lattice bound: eta / (2 K^(d-1)).
// eta = 1 recovers the Bernoulli case.
double epsilon0_renorm(Index K, int d, double eta = 1.0);

// Smallest lambda with lambda / (2 * 3^d) >= 3 ln c'.
double choose_lambda_renorm(double c_prime, int d);

// Largest delta_K compatible with ln(1 + delta (e^lambda - 1)) <= ln c',
// returned as a natural log (the linear value underflows for honest lambdas).
double log_delta_threshold(double lambda, double c_prime);

struct RenormBoundParams {
    int d = 2;
    double c_prime = 2;  // rescaled-lattice animal growth constant
    double lambda = 1;
    double delta_K = 0;
    double epsilon = 0;
    Index n = 1;
    Index K = 2;
};

// The rescaled-lattice exponent bracket
//   -ln c' + (lambda / 3^d)(1 - eps n^(d-1) / u) - ln(1 + delta (e^lambda - 1)),
// with u = floor((n/K)^(d-1)) the minimal rescaled cut cardinality.
double renorm_exponent(const RenormBoundParams& rp);

// log of (3^d h / K) exp(-u ln c'), the closing bound at eps <= 1/(2 K^(d-1)).
double renorm_bound_log(Index n, Index h, Index K, int d, double c_prime);

struct WilsonInterval {
    double lo = 0, hi = 1;
};

// Two-sided Wilson score interval (99% by default wherever the project
// reports one).
WilsonInterval wilson_interval(Index successes, Index trials, double z = 2.5758293035489004);

}  // namespace cylflow
