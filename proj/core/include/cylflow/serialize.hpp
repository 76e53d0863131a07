#pragma once

#include <string>

#include "cylflow/capacity.hpp"
#include "cylflow/estimate.hpp"
#include "cylflow/flow.hpp"
#include "cylflow/lattice.hpp"
#include "cylflow/renorm.hpp"

namespace cylflow {

// Documented JSON form of a cylinder graph: its dimensions plus explicit
// vertex and edge arrays for oracle cross-checking. Not a wire protocol.
std::string graph_json(const LatticeGraph& g, const std::string& manifest_hash = {});

std::string flow_result_json(const LatticeGraph& g, const FlowResult& r, bool include_stream,
                             const std::string& manifest_hash = {});

// CSV: edge index, capacity.
std::string field_csv(const CapacityField& field, const std::string& manifest_hash = {});

// CSV: block index coordinates, U, W flags, X_K.
std::string block_process_csv(const BlockProcess& bp, const std::string& manifest_hash = {});

// CSV: n, h, epsilon, replicates, successes, alpha, ci_lo, ci_hi, censored, rate.
std::string report_csv(const EstimationReport& report, const std::string& manifest_hash = {});

std::string report_json(const EstimationReport& report, const std::string& manifest_hash = {});

}  // namespace cylflow
