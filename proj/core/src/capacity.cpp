#include "cylflow/capacity.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cylflow {

namespace {

constexpr double kProbTol = 1e-9;

double tail_cdf(const TailLaw& law, double x) {
    if (std::holds_alternative<ExponentialTail>(law)) {
        const double rate = std::get<ExponentialTail>(law).rate;
        return x <= 0 ? 0.0 : -std::expm1(-rate * x);
    }
    const auto& u = std::get<UniformTail>(law);
    if (x < u.lo) return 0.0;
    if (x >= u.hi) return 1.0;
    return (x - u.lo) / (u.hi - u.lo);
}

double tail_quantile(const TailLaw& law, double u) {
    if (std::holds_alternative<ExponentialTail>(law)) {
        const double rate = std::get<ExponentialTail>(law).rate;
        return -std::log1p(-u) / rate;  // u in [0,1)
    }
    const auto& box = std::get<UniformTail>(law);
    return box.lo + u * (box.hi - box.lo);
}

}  // namespace

CapacityDistribution CapacityDistribution::bernoulli(double p) {
    if (p < 0 || p > 1) throw ConfigError("bernoulli: p must lie in [0,1], got " + std::to_string(p));
    std::vector<Atom> atoms;
    if (p < 1) atoms.push_back({0.0, 1 - p});
    if (p > 0) atoms.push_back({1.0, p});
    CapacityDistribution d;
    d.atoms_ = std::move(atoms);
    return d;
}

CapacityDistribution CapacityDistribution::constant(double value) {
    if (value < 0) throw ConfigError("constant: value must be >= 0, got " + std::to_string(value));
    CapacityDistribution d;
    d.atoms_ = {{value, 1.0}};
    return d;
}

CapacityDistribution CapacityDistribution::mixture(std::vector<Atom> atoms,
                                                   std::optional<TailLaw> tail,
                                                   double tail_weight) {
    double total = tail ? tail_weight : 0.0;
    if (tail && (tail_weight <= 0 || tail_weight > 1))
        throw ConfigError("mixture: tail weight must lie in (0,1], got " + std::to_string(tail_weight));
    if (!tail && tail_weight != 0) throw ConfigError("mixture: tail weight given without a tail");
    for (const Atom& a : atoms) {
        if (a.value < 0) throw ConfigError("mixture: atom value must be >= 0, got " + std::to_string(a.value));
        if (a.prob <= 0) throw ConfigError("mixture: atom probability must be > 0, got " + std::to_string(a.prob));
        total += a.prob;
    }
    if (std::abs(total - 1.0) > kProbTol)
        throw ConfigError("mixture: probabilities sum to " + std::to_string(total) + ", expected 1");
    if (tail) {
        if (std::holds_alternative<ExponentialTail>(*tail)) {
            if (std::get<ExponentialTail>(*tail).rate <= 0) throw ConfigError("mixture: exponential rate must be > 0");
        } else {
            const auto& u = std::get<UniformTail>(*tail);
            if (u.lo < 0 || u.hi <= u.lo) throw ConfigError("mixture: uniform tail needs 0 <= lo < hi");
        }
    }
    if (atoms.empty() && !tail) throw ConfigError("mixture: empty law");
    CapacityDistribution d;
    d.atoms_ = std::move(atoms);
    d.tail_ = std::move(tail);
    d.tail_weight_ = tail ? tail_weight : 0.0;
    return d;
}

double CapacityDistribution::cdf(double x) const {
    if (x < 0) return 0.0;
    double f = 0;
    for (const Atom& a : atoms_)
        if (a.value <= x) f += a.prob;
    if (tail_) f += tail_weight_ * tail_cdf(*tail_, x);
    return f;
}

bool CapacityDistribution::zero_one_valued() const {
    if (tail_) return false;
    for (const Atom& a : atoms_)
        if (a.value != 0.0 && a.value != 1.0) return false;
    return true;
}

double CapacityDistribution::sample(const SeedSpec& seed, std::uint64_t counter) const {
    const double u = uniform01(seed, counter, 0);
    double cum = 0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        cum += atoms_[i].prob;
        // The last bucket (tail if present, else last atom) absorbs any
        // floating-point slack in the cumulative sum.
        if (u < cum || (!tail_ && i + 1 == atoms_.size())) return atoms_[i].value;
    }
    return tail_quantile(*tail_, uniform01(seed, counter, 1));
}

std::string CapacityDistribution::describe() const {
    std::ostringstream os;
    if (!tail_ && atoms_.size() == 1) {
        os << "constant(" << atoms_[0].value << ")";
        return os.str();
    }
    if (zero_one_valued()) {
        double p = 0;
        for (const Atom& a : atoms_)
            if (a.value == 1.0) p = a.prob;
        os << "bernoulli(" << p << ")";
        return os.str();
    }
    os << "mixture(";
    for (std::size_t i = 0; i < atoms_.size(); ++i)
        os << (i ? " " : "") << atoms_[i].prob << "*d" << atoms_[i].value;
    if (tail_) {
        os << " " << tail_weight_ << "*";
        if (std::holds_alternative<ExponentialTail>(*tail_))
            os << "exp(" << std::get<ExponentialTail>(*tail_).rate << ")";
        else
            os << "unif[" << std::get<UniformTail>(*tail_).lo << "," << std::get<UniformTail>(*tail_).hi << "]";
    }
    os << ")";
    return os.str();
}

bool CapacityField::zero_one() const {
    for (double v : values)
        if (v != 0.0 && v != 1.0) return false;
    return true;
}

CapacityField sample_capacities(const Box& domain, const CapacityDistribution& dist, const SeedSpec& seed) {
    CapacityField f;
    f.domain = domain;
    f.prov = FieldProvenance{dist, seed, false, {}};
    const Index ne = domain.edge_count();
    f.values.resize(static_cast<std::size_t>(ne));
    for (Index e = 0; e < ne; ++e)
        f.values[static_cast<std::size_t>(e)] = dist.sample(seed, static_cast<std::uint64_t>(e));
    return f;
}

CapacityField sample_capacities(const LatticeGraph& g, const CapacityDistribution& dist, const SeedSpec& seed) {
    return sample_capacities(g.box(), dist, seed);
}

CapacityField restrict_field(const CapacityField& field, const Box& sub) {
    if (!field.domain.contains_box(sub))
        throw CoverageError("restrict_field: " + sub.describe() + " not inside " + field.domain.describe());
    CapacityField out;
    out.domain = sub;
    out.prov = field.prov;
    out.prov.derived = true;
    out.prov.note = "restricted to " + sub.describe();
    const Index ne = sub.edge_count();
    out.values.resize(static_cast<std::size_t>(ne));
    for (Index e = 0; e < ne; ++e) {
        auto [base, axis] = sub.edge_base_axis(e);
        out.values[static_cast<std::size_t>(e)] = field.at(field.domain.edge_index(base, axis));
    }
    return out;
}

CapacityField truncate(const CapacityField& field, double eta) {
    if (eta < 0) throw ConfigError("truncate: eta must be >= 0, got " + std::to_string(eta));
    CapacityField out;
    out.domain = field.domain;
    const double p_open = 1.0 - field.prov.dist.cdf(eta);
    out.prov.dist = CapacityDistribution::bernoulli(p_open);
    out.prov.seed = field.prov.seed;
    out.prov.derived = true;
    out.prov.note = "truncated at eta=" + std::to_string(eta);
    out.values.resize(field.values.size());
    for (std::size_t i = 0; i < field.values.size(); ++i)
        out.values[i] = field.values[i] > eta ? 1.0 : 0.0;
    return out;
}

double choose_eta(const CapacityDistribution& dist, double p_c) {
    if (p_c <= 0 || p_c >= 1) throw ConfigError("choose_eta: p_c must lie in (0,1)");
    const double f0 = dist.cdf(0.0);
    if (!(f0 < 1 - p_c)) {
        std::ostringstream os;
        os << "choose_eta: hypothesis F(0) < 1 - p_c fails: F(0) = " << f0 << ", 1 - p_c = " << (1 - p_c);
        throw HypothesisError(os.str());
    }
    double x0 = std::numeric_limits<double>::infinity();
    for (const Atom& a : dist.atoms())
        if (a.value > 0 && a.value < x0) x0 = a.value;
    if (!std::isfinite(x0)) x0 = 1.0;
    double eta = x0;
    for (int j = 0; j <= 60; ++j, eta *= 0.5) {
        if (1 - dist.cdf(eta) > p_c) return eta;
    }
    throw HypothesisError("choose_eta: no eta found after 60 halvings of " + std::to_string(x0));
}

double default_pc(int d) {
    if (d == 2) return 0.5;
    if (d == 3) return 0.2488;
    throw ConfigError("default_pc: no documented default for d = " + std::to_string(d) +
                      "; supply p_c explicitly");
}

}  // namespace cylflow
