#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cylflow/capacity.hpp"
#include "cylflow/estimate.hpp"
#include "cylflow/lattice.hpp"

namespace cylflow {

// Exit code taxonomy, documented in --help. Counterexample detection gets its
// own code because it is scientifically meaningful, not just a failure.
enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitConfig = 2,
    kExitOracleSize = 3,
    kExitCounterexample = 4,
};

struct FlowParams {
    CylinderSpec cyl;
    CapacityDistribution dist = CapacityDistribution::bernoulli(0.5);
    bool emit_graph = false;
    bool emit_field = false;
    bool emit_stream = false;
};

struct SweepParams {
    ExperimentSpec exp;  // seed/replicates/threads mirrored from the manifest
};

struct PathCheckParams {
    Index n = 16;
    Index h = 16;
    Index count = 100;  // configurations with a good crossing block path to verify
};

struct BlocksParams {
    int d = 2;
    Index K = 8;
    double p = 0.9;
    bool dump = false;   // write the block process of replicate 0 as CSV
    bool exact = false;  // exhaustive U/W probabilities for Lambda(K), <= 20 edges
    std::optional<PathCheckParams> path_check;
};

struct BoundsParams {
    int d = 2;
    double p = 0.99;
    double epsilon = 0.1;
    double c = 2;        // diamond growth constant (estimate via `oracle`)
    double c_prime = 2;  // rescaled-lattice growth constant
    Index K = 8;
    Index n = 16;
    Index h = 16;
    std::optional<double> eta;
};

struct OracleParams {
    std::string which;  // min_cut | packing | diamond_count | animal_count | event_prob
    // min_cut / packing
    std::optional<CylinderSpec> cyl;
    std::optional<CapacityDistribution> dist;
    // diamond_count / animal_count
    int d = 2;
    Index s = 3;
    // event_prob
    std::string event = "U";  // U | W
    Index K = 2;
    Index m = 1;
    double p = 0.5;
};

using ManifestParams = std::variant<FlowParams, SweepParams, BlocksParams, BoundsParams, OracleParams>;

// Everything needed to re-execute a run. A stored manifest replays to
// byte-identical artifacts under any thread count.
struct RunManifest {
    std::string kind;  // flow | sweep | blocks | bounds | oracle
    std::uint64_t seed = 0;
    Index replicates = 1000;
    int threads = 1;
    std::string out_dir = "results";
    std::string tool_version;
    ManifestParams params = FlowParams{};
};

struct ParseResult {
    std::optional<RunManifest> manifest;
    std::vector<std::string> violations;  // all of them, not just the first
};

// Strict parse: unknown keys are rejected, every violation is reported.
ParseResult parse_config(const std::string& json_text);

// Canonical JSON of the manifest (sorted keys) and its FNV-1a hash; the hash
// is embedded in every result file the run writes.
std::string manifest_json(const RunManifest& m);
std::string manifest_hash(const RunManifest& m);

// Executes the manifest: writes artifacts plus a manifest copy into out_dir
// and returns an ExitCode.
int run(const RunManifest& m);

}  // namespace cylflow
