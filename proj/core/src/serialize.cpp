#include "cylflow/serialize.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace cylflow {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void append_hash_comment(std::ostringstream& os, const std::string& hash) {
    if (!hash.empty()) os << "# manifest=" << hash << "\n";
}

}  // namespace

std::string graph_json(const LatticeGraph& g, const std::string& manifest_hash) {
    json j;
    if (!manifest_hash.empty()) j["manifest_hash"] = manifest_hash;
    j["spec"]["d"] = g.spec().d;
    j["spec"]["k"] = g.spec().sides;
    j["spec"]["m"] = g.spec().height;
    j["vertex_count"] = g.vertex_count();
    j["edge_count"] = g.edge_count();
    json verts = json::array();
    for (Index v = 0; v < g.vertex_count(); ++v) verts.push_back(g.box().vertex_coord(v));
    j["vertices"] = std::move(verts);
    json edges = json::array();
    for (Index e = 0; e < g.edge_count(); ++e) {
        const auto [u, v] = g.edge_vertices(e);
        edges.push_back({u, v});
    }
    j["edges"] = std::move(edges);
    j["f0"] = g.bottom();
    j["fm"] = g.top();
    return j.dump(2);
}

std::string flow_result_json(const LatticeGraph& g, const FlowResult& r, bool include_stream,
                             const std::string& manifest_hash) {
    json j;
    if (!manifest_hash.empty()) j["manifest_hash"] = manifest_hash;
    j["value"] = r.value;
    if (r.exact) {
        j["exact"]["num"] = r.exact->num;
        j["exact"]["den"] = r.exact->den;
    }
    j["cut"] = r.min_cut;
    j["cut_value"] = r.cut_value;
    j["cut_size"] = r.min_cut.size();
    if (include_stream) {
        json flows = json::array();
        for (Index e = 0; e < g.edge_count(); ++e) {
            const double mag = r.stream.magnitude[static_cast<std::size_t>(e)];
            if (mag == 0) continue;
            const auto [u, v] = g.edge_vertices(e);
            const bool fwd = r.stream.forward[static_cast<std::size_t>(e)] >= 0;
            flows.push_back({{"edge", e}, {"from", fwd ? u : v}, {"to", fwd ? v : u}, {"g", mag}});
        }
        j["stream"] = std::move(flows);
    }
    return j.dump(2);
}

std::string field_csv(const CapacityField& field, const std::string& manifest_hash) {
    std::ostringstream os;
    append_hash_comment(os, manifest_hash);
    os << "edge,capacity\n";
    for (std::size_t e = 0; e < field.values.size(); ++e)
        os << e << "," << fmt_double(field.values[e]) << "\n";
    return os.str();
}

std::string block_process_csv(const BlockProcess& bp, const std::string& manifest_hash) {
    std::ostringstream os;
    append_hash_comment(os, manifest_hash);
    os << "block";
    for (int i = 0; i < bp.d; ++i) os << ",x" << (i + 1);
    os << ",U,W0";
    for (int a = 0; a < bp.d; ++a) os << ",W+" << (a + 1) << ",W-" << (a + 1);
    os << ",X\n";
    for (Index b = 0; b < bp.domain.vertex_count(); ++b) {
        const Coord x = bp.domain.vertex_coord(b);
        const BlockEvents& ev = bp.events[static_cast<std::size_t>(b)];
        os << b;
        for (Index c : x) os << "," << c;
        os << "," << (ev.crossing ? 1 : 0) << "," << (ev.unique_center ? 1 : 0);
        for (bool w : ev.unique_shifted) os << "," << (w ? 1 : 0);
        os << "," << static_cast<int>(bp.x[static_cast<std::size_t>(b)]) << "\n";
    }
    return os.str();
}

std::string report_csv(const EstimationReport& report, const std::string& manifest_hash) {
    std::ostringstream os;
    append_hash_comment(os, manifest_hash);
    os << "n,h,epsilon,replicates,successes,alpha,ci_lo,ci_hi,censored,rate\n";
    for (const AlphaEntry& r : report.rows) {
        os << r.n << "," << r.h << "," << fmt_double(r.epsilon) << "," << r.replicates << ","
           << r.successes << "," << fmt_double(r.alpha) << "," << fmt_double(r.ci_lo) << ","
           << fmt_double(r.ci_hi) << "," << (r.censored ? 1 : 0) << "," << fmt_double(r.rate) << "\n";
    }
    return os.str();
}

std::string report_json(const EstimationReport& report, const std::string& manifest_hash) {
    json j;
    if (!manifest_hash.empty()) j["manifest_hash"] = manifest_hash;
    j["rate_floor"] = report.rate_floor;
    j["rate_above_floor"] = report.rate_above_floor;
    json rows = json::array();
    for (const AlphaEntry& r : report.rows) {
        rows.push_back({{"n", r.n},
                        {"h", r.h},
                        {"epsilon", r.epsilon},
                        {"replicates", r.replicates},
                        {"successes", r.successes},
                        {"alpha", r.alpha},
                        {"ci_lo", r.ci_lo},
                        {"ci_hi", r.ci_hi},
                        {"censored", r.censored},
                        {"rate", r.rate}});
    }
    j["rows"] = std::move(rows);
    return j.dump(2);
}

}  // namespace cylflow
