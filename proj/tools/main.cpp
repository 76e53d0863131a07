// cylflow: maximal flows through lattice cylinders under random capacities.
//
// Subcommands mirror the run manifest kinds: flow (one instance), sweep
// (Monte Carlo rate estimation), blocks (coarse-grained block process),
// bounds (closed-form bound tables), oracle (brute-force cross-checks).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cylflow/cli.hpp"
#include "cylflow/version.hpp"

namespace {

constexpr const char* kExitHelp =
    "exit codes:\n"
    "  0  success\n"
    "  1  internal error\n"
    "  2  configuration rejected (every violation is listed)\n"
    "  3  brute-force oracle refused an instance above its size cap\n"
    "  4  counterexample detected: a good block path without an open crossing\n"
    "     path was found and serialized for inspection\n";

struct CommonOpts {
    std::string config_path;
    std::optional<std::int64_t> seed;
    std::optional<std::int64_t> replicates;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
    bool exact = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
    auto* c = cmd->add_option("-c,--config", opts.config_path, "JSON config file");
    if (config_required) c->required();
    cmd->add_option("--seed", opts.seed, "override the config seed");
    cmd->add_option("--replicates", opts.replicates, "override the replicate count");
    cmd->add_option("--threads", opts.threads, "worker threads (never changes results)");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_flag("--exact", opts.exact, "exhaustive enumeration mode where supported");
}

int run_from_config(const std::string& kind, const CommonOpts& opts, const std::string& inline_json) {
    std::string text;
    if (!inline_json.empty()) {
        text = inline_json;
    } else {
        std::ifstream in(opts.config_path);
        if (!in) {
            std::cerr << "config: cannot open " << opts.config_path << "\n";
            return cylflow::kExitConfig;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }

    cylflow::ParseResult parsed = cylflow::parse_config(text);
    if (!parsed.manifest) {
        std::cerr << "config rejected (" << parsed.violations.size() << " violation"
                  << (parsed.violations.size() == 1 ? "" : "s") << "):\n";
        for (const std::string& v : parsed.violations) std::cerr << "  " << v << "\n";
        return cylflow::kExitConfig;
    }
    cylflow::RunManifest m = *parsed.manifest;
    if (m.kind != kind) {
        std::cerr << "config: kind '" << m.kind << "' does not match subcommand '" << kind << "'\n";
        return cylflow::kExitConfig;
    }
    if (opts.seed) m.seed = static_cast<std::uint64_t>(*opts.seed);
    if (opts.replicates) m.replicates = *opts.replicates;
    if (opts.threads) m.threads = *opts.threads;
    if (opts.out_dir) m.out_dir = *opts.out_dir;
    if (opts.exact && std::holds_alternative<cylflow::BlocksParams>(m.params))
        std::get<cylflow::BlocksParams>(m.params).exact = true;
    return cylflow::run(m);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"maximal flows through cylinders on Z^d: exact solves, block coarse-graining, "
                 "rate estimation, closed-form bounds"};
    app.set_version_flag("--version", cylflow::kVersion);
    app.footer(kExitHelp);
    app.require_subcommand(1);

    CommonOpts flow_opts, sweep_opts, blocks_opts, bounds_opts, oracle_opts;

    // flow also accepts a fully inline instance for quick looks
    auto* flow = app.add_subcommand("flow", "solve one cylinder instance: value and cut size");
    std::optional<int> flow_d;
    std::vector<std::int64_t> flow_k;
    std::optional<std::int64_t> flow_m;
    std::optional<double> flow_p;
    add_common(flow, flow_opts, false);
    flow->add_option("--d", flow_d, "dimension (inline instance)");
    flow->add_option("--k", flow_k, "side lengths (inline instance)");
    flow->add_option("--m", flow_m, "height (inline instance)");
    flow->add_option("--bernoulli", flow_p, "Bernoulli capacity parameter (inline instance)");

    auto* sweep = app.add_subcommand("sweep", "Monte Carlo alpha(eps) and rate estimates over n");
    add_common(sweep, sweep_opts);
    auto* blocks = app.add_subcommand("blocks", "block process: delta_K estimation, dumps, path checks");
    add_common(blocks, blocks_opts);
    auto* bounds = app.add_subcommand("bounds", "closed-form bound calculators");
    add_common(bounds, bounds_opts);
    auto* oracle = app.add_subcommand("oracle", "brute-force oracles (size-capped)");
    add_common(oracle, oracle_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (flow->parsed()) {
            std::string inline_json;
            if (flow_opts.config_path.empty()) {
                if (!flow_d || flow_k.empty() || !flow_m) {
                    std::cerr << "flow: provide --config or all of --d/--k/--m (plus --bernoulli)\n";
                    return cylflow::kExitConfig;
                }
                std::ostringstream os;
                os << "{\"kind\":\"flow\",\"flow\":{\"d\":" << *flow_d << ",\"k\":[";
                for (std::size_t i = 0; i < flow_k.size(); ++i) os << (i ? "," : "") << flow_k[i];
                os << "],\"m\":" << *flow_m << ",\"dist\":{\"type\":\"bernoulli\",\"p\":" << flow_p.value_or(1.0)
                   << "}}}";
                inline_json = os.str();
            }
            return run_from_config("flow", flow_opts, inline_json);
        }
        if (sweep->parsed()) return run_from_config("sweep", sweep_opts, {});
        if (blocks->parsed()) return run_from_config("blocks", blocks_opts, {});
        if (bounds->parsed()) return run_from_config("bounds", bounds_opts, {});
        if (oracle->parsed()) return run_from_config("oracle", oracle_opts, {});
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cylflow::kExitInternal;
    }
    return cylflow::kExitConfig;
}
