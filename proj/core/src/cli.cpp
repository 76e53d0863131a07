#include "cylflow/cli.hpp"

#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "cylflow/flow.hpp"
#include "cylflow/renorm.hpp"
#include "cylflow/serialize.hpp"
#include "cylflow/version.hpp"

namespace cylflow {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Strict config parsing. Each object reader checks its allowed key set and
// accumulates violations instead of stopping at the first one.
// ---------------------------------------------------------------------------
struct Errs {
    std::vector<std::string>* out;
    void add(const std::string& path, const std::string& what) const { out->push_back(path + ": " + what); }
};

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed,
                const Errs& errs) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known) errs.add(path, "unknown key '" + it.key() + "'");
    }
}

std::optional<double> get_num(const json& j, const std::string& path, const char* key, const Errs& errs,
                              bool required = true) {
    if (!j.contains(key)) {
        if (required) errs.add(path, std::string("missing key '") + key + "'");
        return std::nullopt;
    }
    if (!j[key].is_number()) {
        errs.add(path, std::string("'") + key + "' must be a number");
        return std::nullopt;
    }
    return j[key].get<double>();
}

std::optional<Index> get_int(const json& j, const std::string& path, const char* key, const Errs& errs,
                             bool required = true) {
    if (!j.contains(key)) {
        if (required) errs.add(path, std::string("missing key '") + key + "'");
        return std::nullopt;
    }
    if (!j[key].is_number_integer()) {
        errs.add(path, std::string("'") + key + "' must be an integer");
        return std::nullopt;
    }
    return j[key].get<Index>();
}

std::optional<bool> get_bool(const json& j, const std::string& path, const char* key, const Errs& errs) {
    if (!j.contains(key)) return std::nullopt;
    if (!j[key].is_boolean()) {
        errs.add(path, std::string("'") + key + "' must be a boolean");
        return std::nullopt;
    }
    return j[key].get<bool>();
}

std::optional<std::string> get_str(const json& j, const std::string& path, const char* key, const Errs& errs,
                                   bool required = true) {
    if (!j.contains(key)) {
        if (required) errs.add(path, std::string("missing key '") + key + "'");
        return std::nullopt;
    }
    if (!j[key].is_string()) {
        errs.add(path, std::string("'") + key + "' must be a string");
        return std::nullopt;
    }
    return j[key].get<std::string>();
}

std::optional<CapacityDistribution> parse_dist(const json& j, const std::string& path, const Errs& errs) {
    if (!j.is_object()) {
        errs.add(path, "must be an object");
        return std::nullopt;
    }
    const auto type = get_str(j, path, "type", errs);
    if (!type) return std::nullopt;
    try {
        if (*type == "bernoulli") {
            check_keys(j, path, {"type", "p"}, errs);
            const auto p = get_num(j, path, "p", errs);
            if (!p) return std::nullopt;
            return CapacityDistribution::bernoulli(*p);
        }
        if (*type == "constant") {
            check_keys(j, path, {"type", "value"}, errs);
            const auto v = get_num(j, path, "value", errs);
            if (!v) return std::nullopt;
            return CapacityDistribution::constant(*v);
        }
        if (*type == "mixture") {
            check_keys(j, path, {"type", "atoms", "tail", "tail_weight"}, errs);
            std::vector<Atom> atoms;
            if (j.contains("atoms")) {
                if (!j["atoms"].is_array()) {
                    errs.add(path, "'atoms' must be an array");
                    return std::nullopt;
                }
                int i = 0;
                for (const json& a : j["atoms"]) {
                    const std::string apath = path + ".atoms[" + std::to_string(i++) + "]";
                    check_keys(a, apath, {"value", "prob"}, errs);
                    const auto value = get_num(a, apath, "value", errs);
                    const auto prob = get_num(a, apath, "prob", errs);
                    if (value && prob) atoms.push_back({*value, *prob});
                }
            }
            std::optional<TailLaw> tail;
            double weight = 0;
            if (j.contains("tail")) {
                const json& t = j["tail"];
                const std::string tpath = path + ".tail";
                const auto ttype = get_str(t, tpath, "type", errs);
                if (ttype && *ttype == "exponential") {
                    check_keys(t, tpath, {"type", "rate"}, errs);
                    const auto rate = get_num(t, tpath, "rate", errs);
                    if (rate) tail = ExponentialTail{*rate};
                } else if (ttype && *ttype == "uniform") {
                    check_keys(t, tpath, {"type", "lo", "hi"}, errs);
                    const auto lo = get_num(t, tpath, "lo", errs);
                    const auto hi = get_num(t, tpath, "hi", errs);
                    if (lo && hi) tail = UniformTail{*lo, *hi};
                } else if (ttype) {
                    errs.add(tpath, "unknown tail type '" + *ttype + "'");
                }
                const auto w = get_num(j, path, "tail_weight", errs);
                if (w) weight = *w;
            }
            return CapacityDistribution::mixture(std::move(atoms), std::move(tail), weight);
        }
        errs.add(path, "unknown distribution type '" + *type + "'");
    } catch (const ConfigError& e) {
        errs.add(path, e.what());
    }
    return std::nullopt;
}

std::optional<CylinderSpec> parse_cyl(const json& j, const std::string& path, const Errs& errs) {
    CylinderSpec cyl;
    const auto d = get_int(j, path, "d", errs);
    if (!d) return std::nullopt;
    cyl.d = static_cast<int>(*d);
    if (cyl.d < 2) {
        errs.add(path, "'d' must be >= 2, got " + std::to_string(cyl.d));
        return std::nullopt;
    }
    if (!j.contains("k") || !j["k"].is_array()) {
        errs.add(path, "'k' must be an array of side lengths");
        return std::nullopt;
    }
    for (const json& v : j["k"]) {
        if (!v.is_number_integer()) {
            errs.add(path, "'k' entries must be integers");
            return std::nullopt;
        }
        cyl.sides.push_back(v.get<Index>());
    }
    const auto m = get_int(j, path, "m", errs);
    if (!m) return std::nullopt;
    cyl.height = *m;
    try {
        cyl.validate();
    } catch (const ConfigError& e) {
        errs.add(path, e.what());
        return std::nullopt;
    }
    return cyl;
}

std::optional<HeightFn> parse_height(const json& j, const std::string& path, const Errs& errs) {
    if (!j.is_object()) {
        errs.add(path, "must be an object");
        return std::nullopt;
    }
    const auto kind = get_str(j, path, "kind", errs);
    if (!kind) return std::nullopt;
    HeightFn h;
    if (*kind == "constant") {
        check_keys(j, path, {"kind", "value"}, errs);
        const auto v = get_num(j, path, "value", errs);
        if (!v) return std::nullopt;
        h.kind = HeightFn::Kind::Constant;
        h.a = *v;
    } else if (*kind == "linear") {
        check_keys(j, path, {"kind", "factor"}, errs);
        const auto v = get_num(j, path, "factor", errs);
        if (!v) return std::nullopt;
        h.kind = HeightFn::Kind::Linear;
        h.a = *v;
    } else if (*kind == "power") {
        check_keys(j, path, {"kind", "exponent"}, errs);
        const auto v = get_num(j, path, "exponent", errs);
        if (!v) return std::nullopt;
        h.kind = HeightFn::Kind::Power;
        h.a = *v;
    } else if (*kind == "exponential") {
        check_keys(j, path, {"kind", "rate", "base"}, errs);
        const auto r = get_num(j, path, "rate", errs);
        const auto b = get_num(j, path, "base", errs);
        if (!r || !b) return std::nullopt;
        h.kind = HeightFn::Kind::Exponential;
        h.a = *r;
        h.b = *b;
    } else {
        errs.add(path, "unknown height kind '" + *kind + "'");
        return std::nullopt;
    }
    return h;
}

// FNV-1a 64.
std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json dist_to_json(const CapacityDistribution& dist) {
    json j;
    if (dist.atomic() && dist.atoms().size() == 1) {
        j["type"] = "constant";
        j["value"] = dist.atoms()[0].value;
        return j;
    }
    if (dist.zero_one_valued()) {
        double p = 0;
        for (const Atom& a : dist.atoms())
            if (a.value == 1.0) p = a.prob;
        j["type"] = "bernoulli";
        j["p"] = p;
        return j;
    }
    j["type"] = "mixture";
    json atoms = json::array();
    for (const Atom& a : dist.atoms()) atoms.push_back({{"value", a.value}, {"prob", a.prob}});
    j["atoms"] = std::move(atoms);
    if (dist.tail()) {
        json t;
        if (std::holds_alternative<ExponentialTail>(*dist.tail())) {
            t["type"] = "exponential";
            t["rate"] = std::get<ExponentialTail>(*dist.tail()).rate;
        } else {
            t["type"] = "uniform";
            t["lo"] = std::get<UniformTail>(*dist.tail()).lo;
            t["hi"] = std::get<UniformTail>(*dist.tail()).hi;
        }
        j["tail"] = std::move(t);
        j["tail_weight"] = dist.tail_weight();
    }
    return j;
}

json height_to_json(const HeightFn& h) {
    json j;
    switch (h.kind) {
        case HeightFn::Kind::Constant:
            j["kind"] = "constant";
            j["value"] = h.a;
            break;
        case HeightFn::Kind::Linear:
            j["kind"] = "linear";
            j["factor"] = h.a;
            break;
        case HeightFn::Kind::Power:
            j["kind"] = "power";
            j["exponent"] = h.a;
            break;
        case HeightFn::Kind::Exponential:
            j["kind"] = "exponential";
            j["rate"] = h.a;
            j["base"] = h.b;
            break;
    }
    return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
}

}  // namespace

ParseResult parse_config(const std::string& json_text) {
    ParseResult result;
    Errs errs{&result.violations};

    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        errs.add("$", std::string("invalid JSON: ") + e.what());
        return result;
    }
    if (!j.is_object()) {
        errs.add("$", "top level must be an object");
        return result;
    }

    // tool_version and hash appear in written manifests; accepted so a stored
    // manifest replays as-is.
    check_keys(j, "$",
               {"kind", "seed", "replicates", "threads", "out", "flow", "sweep", "blocks", "bounds", "oracle",
                "tool_version", "hash"},
               errs);

    RunManifest m;
    m.tool_version = kVersion;
    const auto kind = get_str(j, "$", "kind", errs);
    if (!kind) return result;
    m.kind = *kind;

    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() || j["seed"].get<std::int64_t>() < 0)
            errs.add("$", "'seed' must be a non-negative integer");
        else
            m.seed = j["seed"].get<std::uint64_t>();
    }
    if (const auto r = get_int(j, "$", "replicates", errs, false)) {
        if (*r < 1)
            errs.add("$", "'replicates' must be >= 1, got " + std::to_string(*r));
        else
            m.replicates = *r;
    }
    if (const auto t = get_int(j, "$", "threads", errs, false)) {
        if (*t < 1 || *t > 256)
            errs.add("$", "'threads' must lie in [1,256], got " + std::to_string(*t));
        else
            m.threads = static_cast<int>(*t);
    }
    if (const auto o = get_str(j, "$", "out", errs, false)) m.out_dir = *o;

    const bool known_kind =
        m.kind == "flow" || m.kind == "sweep" || m.kind == "blocks" || m.kind == "bounds" || m.kind == "oracle";
    if (!known_kind) {
        errs.add("$", "unknown kind '" + m.kind + "' (expected flow|sweep|blocks|bounds|oracle)");
        return result;
    }
    for (const char* section : {"flow", "sweep", "blocks", "bounds", "oracle"}) {
        if (j.contains(section) && m.kind != section)
            errs.add("$", std::string("section '") + section + "' does not match kind '" + m.kind + "'");
    }
    if (!j.contains(m.kind)) {
        errs.add("$", "missing section '" + m.kind + "'");
        return result;
    }
    const json& sec = j[m.kind];
    const std::string path = "$." + m.kind;
    if (!sec.is_object()) {
        errs.add(path, "must be an object");
        return result;
    }

    if (m.kind == "flow") {
        check_keys(sec, path, {"d", "k", "m", "dist", "emit_graph", "emit_field", "emit_stream"}, errs);
        FlowParams fp;
        if (const auto cyl = parse_cyl(sec, path, errs)) fp.cyl = *cyl;
        if (sec.contains("dist")) {
            if (const auto dist = parse_dist(sec["dist"], path + ".dist", errs)) fp.dist = *dist;
        } else {
            errs.add(path, "missing key 'dist'");
        }
        if (const auto b = get_bool(sec, path, "emit_graph", errs)) fp.emit_graph = *b;
        if (const auto b = get_bool(sec, path, "emit_field", errs)) fp.emit_field = *b;
        if (const auto b = get_bool(sec, path, "emit_stream", errs)) fp.emit_stream = *b;
        m.params = std::move(fp);
    } else if (m.kind == "sweep") {
        check_keys(sec, path, {"d", "n", "height", "dist", "epsilons", "rate_floor"}, errs);
        SweepParams sp;
        sp.exp.d = 2;
        if (const auto d = get_int(sec, path, "d", errs)) {
            if (*d < 2)
                errs.add(path, "'d' must be >= 2, got " + std::to_string(*d));
            else
                sp.exp.d = static_cast<int>(*d);
        }
        if (sec.contains("n") && sec["n"].is_array()) {
            for (const json& v : sec["n"]) {
                if (v.is_number_integer())
                    sp.exp.n_list.push_back(v.get<Index>());
                else
                    errs.add(path, "'n' entries must be integers");
            }
        } else {
            errs.add(path, "'n' must be an array of sides");
        }
        if (sec.contains("height")) {
            if (const auto h = parse_height(sec["height"], path + ".height", errs)) sp.exp.height = *h;
        } else {
            errs.add(path, "missing key 'height'");
        }
        if (sec.contains("dist")) {
            if (const auto dist = parse_dist(sec["dist"], path + ".dist", errs)) sp.exp.dist = *dist;
        } else {
            errs.add(path, "missing key 'dist'");
        }
        if (sec.contains("epsilons") && sec["epsilons"].is_array()) {
            for (const json& v : sec["epsilons"]) {
                if (v.is_number() && v.get<double>() >= 0)
                    sp.exp.epsilons.push_back(v.get<double>());
                else
                    errs.add(path, "'epsilons' entries must be numbers >= 0");
            }
        } else {
            errs.add(path, "'epsilons' must be an array");
        }
        if (const auto f = get_num(sec, path, "rate_floor", errs, false)) sp.exp.rate_floor = *f;
        sp.exp.seed = m.seed;
        sp.exp.replicates = m.replicates;
        sp.exp.threads = m.threads;
        if (result.violations.empty()) {
            try {
                sp.exp.validate();
            } catch (const ConfigError& e) {
                errs.add(path, e.what());
            }
        }
        m.params = std::move(sp);
    } else if (m.kind == "blocks") {
        check_keys(sec, path, {"d", "K", "p", "dump", "exact", "path_check"}, errs);
        BlocksParams bp;
        if (const auto d = get_int(sec, path, "d", errs)) {
            if (*d < 2)
                errs.add(path, "'d' must be >= 2, got " + std::to_string(*d));
            else
                bp.d = static_cast<int>(*d);
        }
        if (const auto K = get_int(sec, path, "K", errs)) {
            if (*K < 2 || *K % 2 != 0)
                errs.add(path, "'K' must be a positive even integer (the K/2 shifts must be lattice vectors), got " +
                                   std::to_string(*K));
            else
                bp.K = *K;
        }
        if (const auto p = get_num(sec, path, "p", errs)) {
            if (*p < 0 || *p > 1)
                errs.add(path, "'p' must lie in [0,1]");
            else
                bp.p = *p;
        }
        if (const auto b = get_bool(sec, path, "dump", errs)) bp.dump = *b;
        if (const auto b = get_bool(sec, path, "exact", errs)) bp.exact = *b;
        if (sec.contains("path_check")) {
            const json& pc = sec["path_check"];
            const std::string ppath = path + ".path_check";
            check_keys(pc, ppath, {"n", "h", "count"}, errs);
            PathCheckParams pcp;
            if (const auto n = get_int(pc, ppath, "n", errs)) pcp.n = *n;
            if (const auto h = get_int(pc, ppath, "h", errs)) pcp.h = *h;
            if (const auto c = get_int(pc, ppath, "count", errs)) pcp.count = *c;
            if (pcp.n < 1 || pcp.h < 1 || pcp.count < 1) errs.add(ppath, "n, h and count must be >= 1");
            bp.path_check = pcp;
        }
        m.params = std::move(bp);
    } else if (m.kind == "bounds") {
        check_keys(sec, path, {"d", "p", "epsilon", "c", "c_prime", "K", "n", "h", "eta"}, errs);
        BoundsParams bp;
        if (const auto d = get_int(sec, path, "d", errs)) bp.d = static_cast<int>(*d);
        if (const auto p = get_num(sec, path, "p", errs)) bp.p = *p;
        if (const auto e = get_num(sec, path, "epsilon", errs)) bp.epsilon = *e;
        if (const auto c = get_num(sec, path, "c", errs)) bp.c = *c;
        if (const auto c = get_num(sec, path, "c_prime", errs)) bp.c_prime = *c;
        if (const auto K = get_int(sec, path, "K", errs)) bp.K = *K;
        if (const auto n = get_int(sec, path, "n", errs)) bp.n = *n;
        if (const auto h = get_int(sec, path, "h", errs)) bp.h = *h;
        if (const auto eta = get_num(sec, path, "eta", errs, false)) bp.eta = *eta;
        if (bp.d < 2) errs.add(path, "'d' must be >= 2");
        if (bp.c <= 1) errs.add(path, "'c' must be > 1");
        if (bp.c_prime <= 1) errs.add(path, "'c_prime' must be > 1");
        if (bp.epsilon < 0 || bp.epsilon >= 1) errs.add(path, "'epsilon' must lie in [0,1)");
        if (bp.p < 0 || bp.p > 1) errs.add(path, "'p' must lie in [0,1]");
        if (bp.K < 2 || bp.K % 2 != 0) errs.add(path, "'K' must be a positive even integer");
        if (bp.eta && *bp.eta <= 0) errs.add(path, "'eta' must be > 0");
        m.params = std::move(bp);
    } else if (m.kind == "oracle") {
        check_keys(sec, path, {"which", "d", "k", "m", "dist", "s", "K", "event", "p"}, errs);
        OracleParams op;
        const auto which = get_str(sec, path, "which", errs);
        if (!which) return result;
        op.which = *which;
        if (op.which == "min_cut" || op.which == "packing") {
            if (const auto cyl = parse_cyl(sec, path, errs)) op.cyl = *cyl;
            if (sec.contains("dist")) {
                if (const auto dist = parse_dist(sec["dist"], path + ".dist", errs)) op.dist = *dist;
            } else {
                errs.add(path, "missing key 'dist'");
            }
        } else if (op.which == "diamond_count" || op.which == "animal_count") {
            if (const auto d = get_int(sec, path, "d", errs)) op.d = static_cast<int>(*d);
            if (const auto s = get_int(sec, path, "s", errs)) op.s = *s;
        } else if (op.which == "event_prob") {
            if (const auto d = get_int(sec, path, "d", errs)) op.d = static_cast<int>(*d);
            if (const auto K = get_int(sec, path, "K", errs)) op.K = *K;
            if (const auto ev = get_str(sec, path, "event", errs)) op.event = *ev;
            if (op.event == "W") {
                if (const auto mm = get_int(sec, path, "m", errs)) op.m = *mm;
            }
            if (const auto p = get_num(sec, path, "p", errs)) op.p = *p;
            if (op.event != "U" && op.event != "W") errs.add(path, "'event' must be U or W");
            if (op.K < 2 || op.K % 2 != 0) errs.add(path, "'K' must be a positive even integer");
        } else {
            errs.add(path, "unknown oracle '" + op.which +
                               "' (expected min_cut|packing|diamond_count|animal_count|event_prob)");
        }
        m.params = std::move(op);
    }

    if (!result.violations.empty()) return result;
    result.manifest = std::move(m);
    return result;
}

std::string manifest_json(const RunManifest& m) {
    // Canonical form: the experiment identity. Worker count and output
    // location are deliberately excluded so the hash is stable across
    // --threads and --out, matching the byte-identical artifact guarantee.
    json j;
    j["kind"] = m.kind;
    j["seed"] = m.seed;
    j["replicates"] = m.replicates;
    j["tool_version"] = m.tool_version.empty() ? kVersion : m.tool_version;

    if (std::holds_alternative<FlowParams>(m.params)) {
        const auto& fp = std::get<FlowParams>(m.params);
        json s;
        s["d"] = fp.cyl.d;
        s["k"] = fp.cyl.sides;
        s["m"] = fp.cyl.height;
        s["dist"] = dist_to_json(fp.dist);
        s["emit_graph"] = fp.emit_graph;
        s["emit_field"] = fp.emit_field;
        s["emit_stream"] = fp.emit_stream;
        j["flow"] = std::move(s);
    } else if (std::holds_alternative<SweepParams>(m.params)) {
        const auto& sp = std::get<SweepParams>(m.params);
        json s;
        s["d"] = sp.exp.d;
        s["n"] = sp.exp.n_list;
        s["height"] = height_to_json(sp.exp.height);
        s["dist"] = dist_to_json(sp.exp.dist);
        s["epsilons"] = sp.exp.epsilons;
        s["rate_floor"] = sp.exp.rate_floor;
        j["sweep"] = std::move(s);
    } else if (std::holds_alternative<BlocksParams>(m.params)) {
        const auto& bp = std::get<BlocksParams>(m.params);
        json s;
        s["d"] = bp.d;
        s["K"] = bp.K;
        s["p"] = bp.p;
        s["dump"] = bp.dump;
        s["exact"] = bp.exact;
        if (bp.path_check) {
            s["path_check"] = {{"n", bp.path_check->n}, {"h", bp.path_check->h}, {"count", bp.path_check->count}};
        }
        j["blocks"] = std::move(s);
    } else if (std::holds_alternative<BoundsParams>(m.params)) {
        const auto& bp = std::get<BoundsParams>(m.params);
        json s;
        s["d"] = bp.d;
        s["p"] = bp.p;
        s["epsilon"] = bp.epsilon;
        s["c"] = bp.c;
        s["c_prime"] = bp.c_prime;
        s["K"] = bp.K;
        s["n"] = bp.n;
        s["h"] = bp.h;
        if (bp.eta) s["eta"] = *bp.eta;
        j["bounds"] = std::move(s);
    } else {
        const auto& op = std::get<OracleParams>(m.params);
        json s;
        s["which"] = op.which;
        if (op.cyl) {
            s["d"] = op.cyl->d;
            s["k"] = op.cyl->sides;
            s["m"] = op.cyl->height;
        }
        if (op.dist) s["dist"] = dist_to_json(*op.dist);
        if (op.which == "diamond_count" || op.which == "animal_count") {
            s["d"] = op.d;
            s["s"] = op.s;
        }
        if (op.which == "event_prob") {
            s["d"] = op.d;
            s["K"] = op.K;
            s["event"] = op.event;
            if (op.event == "W") s["m"] = op.m;
            s["p"] = op.p;
        }
        j["oracle"] = std::move(s);
    }
    return j.dump(2);
}

std::string manifest_hash(const RunManifest& m) { return fnv1a_hex(manifest_json(m)); }

namespace {

int run_flow(const RunManifest& m, const std::string& hash, const std::filesystem::path& out) {
    const auto& fp = std::get<FlowParams>(m.params);
    const LatticeGraph g = build_cylinder(fp.cyl);
    const CapacityField field = sample_capacities(g, fp.dist, SeedSpec{m.seed, 0});
    const FlowResult res = max_flow(g, field);
    std::cout << "phi = " << res.value << "  cut size = " << res.min_cut.size() << "\n";
    write_file(out / "flow.json", flow_result_json(g, res, fp.emit_stream, hash));
    if (fp.emit_graph) write_file(out / "graph.json", graph_json(g, hash));
    if (fp.emit_field) write_file(out / "field.csv", field_csv(field, hash));
    return kExitOk;
}

int run_sweep(const RunManifest& m, const std::string& hash, const std::filesystem::path& out) {
    auto sp = std::get<SweepParams>(m.params);
    sp.exp.seed = m.seed;
    sp.exp.replicates = m.replicates;
    sp.exp.threads = m.threads;
    const EstimationReport report = rate_sweep(sp.exp);
    write_file(out / "sweep.csv", report_csv(report, hash));
    write_file(out / "sweep.json", report_json(report, hash));
    for (const AlphaEntry& row : report.rows) {
        std::cout << "n=" << row.n << " h=" << row.h << " eps=" << row.epsilon << " alpha=" << row.alpha
                  << (row.censored ? " (censored)" : "") << " rate=" << row.rate << "\n";
    }
    std::cout << "rate floor " << report.rate_floor << ": " << (report.rate_above_floor ? "held" : "broken")
              << "  (" << report.wall_seconds << " s)\n";
    return kExitOk;
}

int run_blocks(const RunManifest& m, const std::string& hash, const std::filesystem::path& out) {
    const auto& bp = std::get<BlocksParams>(m.params);

    if (bp.d == 2 || bp.d == 3) {
        if (bp.p <= default_pc(bp.d))
            std::cerr << "warning: p = " << bp.p << " is not above p_c(" << bp.d << ") = " << default_pc(bp.d)
                      << "; delta_K will not vanish\n";
    }

    json j;
    j["manifest_hash"] = hash;

    const DeltaEstimate est = estimate_delta_K(bp.d, bp.K, bp.p, m.replicates, SeedSpec{m.seed, 0}, m.threads);
    std::cout << "delta_" << bp.K << " = " << est.delta_hat << "  [" << est.ci_lo << ", " << est.ci_hi
              << "]  (" << est.bad << "/" << est.replicates << " bad)\n";
    j["delta"] = {{"K", bp.K},      {"p", bp.p},          {"estimate", est.delta_hat},
                  {"ci_lo", est.ci_lo}, {"ci_hi", est.ci_hi}, {"replicates", est.replicates},
                  {"bad", est.bad}};

    BlockLattice lat(bp.d, bp.K);
    if (bp.dump) {
        // block process of replicate 0 over a 3-wide index window around 0
        Coord lo(static_cast<std::size_t>(bp.d), -1), hi(static_cast<std::size_t>(bp.d), 1);
        const Box domain(lo, hi);
        Coord alo(static_cast<std::size_t>(bp.d)), ahi(static_cast<std::size_t>(bp.d));
        for (int i = 0; i < bp.d; ++i) {
            alo[static_cast<std::size_t>(i)] = -2 * bp.K;
            ahi[static_cast<std::size_t>(i)] = 2 * bp.K;
        }
        const CapacityField field =
            sample_capacities(Box(alo, ahi), CapacityDistribution::bernoulli(bp.p), SeedSpec{m.seed, 0});
        write_file(out / "blocks.csv", block_process_csv(block_process(field, bp.K, domain), hash));
    }
    if (bp.exact) {
        const Box lambda_k = lat.block_box(Coord(static_cast<std::size_t>(bp.d), 0));
        const auto u = exact_event_probability(BoxEvent::CrossingCluster, lambda_k, bp.p);
        const auto w = exact_event_probability(BoxEvent::UniqueLargeCluster, lambda_k, bp.p, (bp.K + 2) / 3);
        std::cout << "exact: P[U] = " << u.probability << " (" << u.satisfying << "/" << u.total
                  << ")  P[W] = " << w.probability << " (" << w.satisfying << "/" << w.total << ")\n";
        j["exact"] = {{"U", {{"probability", u.probability}, {"satisfying", u.satisfying}, {"total", u.total}}},
                      {"W", {{"probability", w.probability}, {"satisfying", w.satisfying}, {"total", w.total}}}};
    }
    if (bp.path_check) {
        const PathCheckParams& pc = *bp.path_check;
        CylinderSpec cyl;
        cyl.d = bp.d;
        cyl.sides.assign(static_cast<std::size_t>(bp.d - 1), pc.n);
        cyl.height = pc.h;
        const Box cylinder = cyl.box();
        const Box rescaled = lat.rescale_region(cylinder);

        Box bottom_face = cylinder, top_face = cylinder;
        {
            Coord lo = cylinder.lo(), hi = cylinder.hi();
            hi[static_cast<std::size_t>(bp.d - 1)] = lo[static_cast<std::size_t>(bp.d - 1)];
            bottom_face = Box(lo, hi);
            lo = cylinder.lo();
            hi = cylinder.hi();
            lo[static_cast<std::size_t>(bp.d - 1)] = hi[static_cast<std::size_t>(bp.d - 1)];
            top_face = Box(lo, hi);
        }
        const Box bottom_layer = lat.rescale_region(bottom_face);
        const Box top_layer = lat.rescale_region(top_face);

        // ambient box covering every event box of the rescaled domain
        Coord alo(static_cast<std::size_t>(bp.d)), ahi(static_cast<std::size_t>(bp.d));
        for (int i = 0; i < bp.d; ++i) {
            alo[static_cast<std::size_t>(i)] = bp.K * (rescaled.lo()[static_cast<std::size_t>(i)] - 1) - bp.K / 2 + 1;
            ahi[static_cast<std::size_t>(i)] = bp.K * (rescaled.hi()[static_cast<std::size_t>(i)] + 1) + bp.K / 2;
        }
        const Box ambient(alo, ahi);
        const auto dist = CapacityDistribution::bernoulli(bp.p);

        Index verified = 0;
        std::uint64_t replicate = 0;
        while (verified < pc.count) {
            const SeedSpec seed{m.seed, replicate++};
            if (replicate > static_cast<std::uint64_t>(pc.count) * 1000)
                throw std::runtime_error("path_check: good block paths too rare at these parameters");
            const CapacityField field = sample_capacities(ambient, dist, seed);
            const BlockProcess process = block_process(field, bp.K, rescaled);

            // BFS over good blocks from the bottom layer to the top layer.
            std::vector<Index> parent(static_cast<std::size_t>(rescaled.vertex_count()), -2);
            std::deque<Index> queue;
            for (Index b = 0; b < rescaled.vertex_count(); ++b) {
                const Coord x = rescaled.vertex_coord(b);
                if (bottom_layer.contains(x) && process.good(x)) {
                    parent[static_cast<std::size_t>(b)] = -1;
                    queue.push_back(b);
                }
            }
            Index goal = -1;
            while (!queue.empty() && goal < 0) {
                const Index b = queue.front();
                queue.pop_front();
                const Coord x = rescaled.vertex_coord(b);
                if (top_layer.contains(x)) {
                    goal = b;
                    break;
                }
                for (int a = 0; a < bp.d; ++a) {
                    for (int sign : {+1, -1}) {
                        Coord y = x;
                        y[static_cast<std::size_t>(a)] += sign;
                        if (!rescaled.contains(y) || !process.good(y)) continue;
                        const Index w = rescaled.vertex_index(y);
                        if (parent[static_cast<std::size_t>(w)] != -2) continue;
                        parent[static_cast<std::size_t>(w)] = b;
                        queue.push_back(w);
                    }
                }
            }
            if (goal < 0) continue;  // no good crossing block path in this configuration

            std::vector<Coord> block_path;
            for (Index b = goal; b != -1; b = parent[static_cast<std::size_t>(b)])
                block_path.push_back(rescaled.vertex_coord(b));
            std::reverse(block_path.begin(), block_path.end());

            const auto open_path = construct_crossing_path(field, bp.K, cylinder, block_path);
            if (!open_path) {
                // The construction is guaranteed; a failure is a counterexample
                // worth keeping, not retrying.
                json cx;
                cx["manifest_hash"] = hash;
                cx["seed"] = seed.seed;
                cx["replicate"] = seed.replicate;
                cx["K"] = bp.K;
                cx["p"] = bp.p;
                cx["cylinder"] = {{"n", pc.n}, {"h", pc.h}};
                json path = json::array();
                for (const Coord& x : block_path) path.push_back(x);
                cx["block_path"] = std::move(path);
                cx["field_csv"] = field_csv(field);
                write_file(out / "counterexample.json", cx.dump(2));
                std::cerr << "counterexample: good block path without an open crossing path (replicate "
                          << seed.replicate << ")\n";
                return kExitCounterexample;
            }
            ++verified;
        }
        std::cout << "path_check: " << verified << "/" << pc.count << " good block paths produced open paths\n";
        j["path_check"] = {{"verified", verified}, {"count", pc.count}};
    }

    write_file(out / "blocks.json", j.dump(2));
    return kExitOk;
}

int run_bounds(const RunManifest& m, const std::string& hash, const std::filesystem::path& out) {
    const auto& bp = std::get<BoundsParams>(m.params);
    const LambdaP0 lp = choose_lambda_p0(bp.epsilon, bp.c);
    BoundParams cheb;
    cheb.p = bp.p;
    cheb.epsilon = bp.epsilon;
    cheb.d = bp.d;
    cheb.lambda = lp.lambda;
    cheb.c = bp.c;
    const double surface = std::pow(static_cast<double>(bp.n), bp.d - 1);
    cheb.rho = std::log(static_cast<double>(bp.h)) / surface;
    const double bracket = chebyshev_exponent(cheb);
    const ZeroFlowBound zf = zero_flow_bound(bp.n, bp.h, bp.p, bp.d);
    const double lambda_r = choose_lambda_renorm(bp.c_prime, bp.d);

    json j;
    j["manifest_hash"] = hash;
    j["lambda"] = lp.lambda;
    j["p0"] = lp.p0;
    j["chebyshev_bracket"] = bracket;
    j["alpha_bound_log"] = -surface * bracket;
    j["zero_flow_bound_log"] = zf.log_value;
    j["zero_flow_bound"] = zf.value;
    j["epsilon0"] = epsilon0_renorm(bp.K, bp.d, bp.eta.value_or(1.0));
    j["lambda_renorm"] = lambda_r;
    j["log_delta_threshold"] = log_delta_threshold(lambda_r, bp.c_prime);
    j["renorm_bound_log"] = renorm_bound_log(bp.n, bp.h, bp.K, bp.d, bp.c_prime);

    std::ostringstream csv;
    csv << "# manifest=" << hash << "\n";
    csv << "quantity,value\n";
    for (const auto& [key, value] : j.items()) {
        if (key == "manifest_hash") continue;
        csv << key << "," << value.dump() << "\n";
    }
    write_file(out / "bounds.json", j.dump(2));
    write_file(out / "bounds.csv", csv.str());
    std::cout << "lambda = " << lp.lambda << "  p0 = " << lp.p0 << "  bracket = " << bracket
              << "  eps0 = " << j["epsilon0"].get<double>() << "\n";
    return kExitOk;
}

int run_oracle(const RunManifest& m, const std::string& hash, const std::filesystem::path& out) {
    const auto& op = std::get<OracleParams>(m.params);
    json j;
    j["manifest_hash"] = hash;
    j["which"] = op.which;

    if (op.which == "min_cut" || op.which == "packing") {
        const LatticeGraph g = build_cylinder(*op.cyl);
        const CapacityField field = sample_capacities(g, *op.dist, SeedSpec{m.seed, 0});
        if (op.which == "min_cut") {
            const BruteForceCut bf = brute_force_min_cut(g, field);
            const FlowResult res = max_flow(g, field);
            std::cout << "brute force min cut = " << bf.value << "  solver phi = " << res.value << "\n";
            j["brute_force"] = bf.value;
            j["solver"] = res.value;
            if (bf.exact) j["brute_force_exact"] = {{"num", bf.exact->num}, {"den", bf.exact->den}};
        } else {
            if (!field.zero_one()) throw ConfigError("oracle packing: distribution must be 0/1-valued");
            const DisjointPaths paths = count_disjoint_open_paths(g, field);
            std::cout << "disjoint open paths = " << paths.count << "\n";
            j["paths"] = paths.count;
        }
    } else if (op.which == "diamond_count" || op.which == "animal_count") {
        const AnimalCount counts =
            op.which == "diamond_count" ? count_diamond_sets(op.s, op.d) : count_lattice_animals(op.s, op.d);
        j["counts"] = counts.counts;
        j["growth"] = counts.growth;
        std::cout << op.which << ":";
        for (Index c : counts.counts) std::cout << " " << c;
        std::cout << "  growth ~ " << counts.growth << "\n";
    } else {  // event_prob
        BlockLattice lat(op.d, op.K);
        const Box box = lat.block_box(Coord(static_cast<std::size_t>(op.d), 0));
        const auto kind = op.event == "U" ? BoxEvent::CrossingCluster : BoxEvent::UniqueLargeCluster;
        const auto prob = exact_event_probability(kind, box, op.p, op.m);
        std::cout << "P[" << op.event << "] = " << prob.probability << " (" << prob.satisfying << "/"
                  << prob.total << ")\n";
        j["probability"] = prob.probability;
        j["satisfying"] = prob.satisfying;
        j["total"] = prob.total;
    }
    write_file(out / "oracle.json", j.dump(2));
    return kExitOk;
}

}  // namespace

int run(const RunManifest& m) {
    try {
        const std::filesystem::path out(m.out_dir);
        std::filesystem::create_directories(out);
        const std::string hash = manifest_hash(m);
        {
            json j = json::parse(manifest_json(m));
            j["hash"] = hash;
            j["threads"] = m.threads;
            j["out"] = m.out_dir;
            write_file(out / "manifest.json", j.dump(2));
        }
        if (m.kind == "flow") return run_flow(m, hash, out);
        if (m.kind == "sweep") return run_sweep(m, hash, out);
        if (m.kind == "blocks") return run_blocks(m, hash, out);
        if (m.kind == "bounds") return run_bounds(m, hash, out);
        if (m.kind == "oracle") return run_oracle(m, hash, out);
        std::cerr << "unknown kind '" << m.kind << "'\n";
        return kExitConfig;
    } catch (const OracleSizeError& e) {
        std::cerr << "oracle size: " << e.what() << "\n";
        return kExitOracleSize;
    } catch (const ConfigError& e) {
        std::cerr << "config: " << e.what() << "\n";
        return kExitConfig;
    } catch (const HypothesisError& e) {
        std::cerr << "hypothesis: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace cylflow
