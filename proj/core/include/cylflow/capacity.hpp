#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cylflow/lattice.hpp"
#include "cylflow/rng.hpp"

namespace cylflow {

struct Atom {
    double value = 0;  // >= 0
    double prob = 0;   // > 0
};

struct ExponentialTail {
    double rate = 1;  // > 0
};

struct UniformTail {
    double lo = 0;  // 0 <= lo < hi
    double hi = 1;
};

using TailLaw = std::variant<ExponentialTail, UniformTail>;

// A capacity law: point masses plus an optional continuous tail. Bernoulli
// and constants are just special atom layouts with a kind tag kept for
// display and for the 0/1 fast paths.
class CapacityDistribution {
  public:
    static CapacityDistribution bernoulli(double p);
    static CapacityDistribution constant(double value);
    static CapacityDistribution mixture(std::vector<Atom> atoms,
                                        std::optional<TailLaw> tail = std::nullopt,
                                        double tail_weight = 0.0);

    // Right-continuous distribution function; 0 below the support.
    double cdf(double x) const;

    bool atomic() const { return !tail_.has_value(); }
    bool zero_one_valued() const;
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::optional<TailLaw>& tail() const { return tail_; }
    double tail_weight() const { return tail_weight_; }

    // One draw for the stream position `counter` (typically an edge index).
    double sample(const SeedSpec& seed, std::uint64_t counter) const;

    std::string describe() const;

  private:
    CapacityDistribution() = default;
    std::vector<Atom> atoms_;
    std::optional<TailLaw> tail_;
    double tail_weight_ = 0;
};

// How a field came to be; sampled fields regenerate bit-exactly from it.
struct FieldProvenance {
    CapacityDistribution dist = CapacityDistribution::constant(0);
    SeedSpec seed;
    bool derived = false;  // true for truncations/restrictions
    std::string note;
};

// One capacity per edge of a box domain, in the box's edge order.
struct CapacityField {
    Box domain;
    std::vector<double> values;
    FieldProvenance prov;

    double at(Index edge) const { return values[static_cast<std::size_t>(edge)]; }
    bool zero_one() const;  // every value is exactly 0.0 or 1.0
};

// I.I.D. sampling over the edges of a box. The value at edge i is a pure
// function of (seed, replicate, i), so any evaluation order and any worker
// count produce the same field.
CapacityField sample_capacities(const Box& domain, const CapacityDistribution& dist, const SeedSpec& seed);
CapacityField sample_capacities(const LatticeGraph& g, const CapacityDistribution& dist, const SeedSpec& seed);

// Copies the values of `field` living on the edges of `sub` (sub must be
// contained in the field's domain).
CapacityField restrict_field(const CapacityField& field, const Box& sub);

// t'(e) = 1 if t(e) > eta (strictly), else 0. The result is Bernoulli-typed
// with parameter 1 - F(eta).
CapacityField truncate(const CapacityField& field, double eta);

// Largest eta on the geometric grid {x0 * 2^-j} with 1 - F(eta) > p_c, where
// x0 is the smallest positive atom (1 if none). Requires F(0) < 1 - p_c.
double choose_eta(const CapacityDistribution& dist, double p_c);

// Documented defaults: 1/2 for d=2 (exact), 0.2488 for d=3 (literature value).
// Other dimensions must supply p_c explicitly.
double default_pc(int d);

}  // namespace cylflow
