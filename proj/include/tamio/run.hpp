#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tamio/layout.hpp"
#include "tamio/pipeline.hpp"
#include "tamio/workloads.hpp"

namespace tamio {

enum class Method { Tam, TwoPhase, Both };

// One experiment configuration. Every field has a JSON mirror (see
// config_from_json) and a CLI flag; flags override the file.
struct RunConfig {
    WorkloadSpec workload;

    int nodes = 1;
    int procs_per_node = 0;  // 0: derive from procs / nodes
    int procs = 0;           // total P; 0: nodes * procs_per_node

    int aggs_per_node = 1;  // c
    int p_l = 0;            // alternative to c; must be c * nodes
    int p_g = 0;            // 0: stripe_count
    std::uint64_t stripe_size = std::uint64_t{1} << 20;
    int stripe_count = 0;  // 0: p_g; both zero: one aggregator per node
    std::uint64_t stripes_per_round = 1;
    int global_pick = 0;

    GlobalPolicy policy = GlobalPolicy::SpreadEven;
    OverlapPolicy overlap = OverlapPolicy::Strict;
    Method method = Method::Both;
    std::uint64_t seed = 0;
    bool verify = true;

    std::string out_path;
    std::string csv_path;
    std::string trace_path;
    std::string dump_path;
};

// Resolved derived values (q, c, P, P_G) after validation.
struct ResolvedConfig {
    Topology topo{1, 1};
    int aggs_per_node = 1;
    int p_g = 1;
    StripeConfig stripe{1, 1};
};

// Validates and resolves; throws config_error naming the offending fields.
ResolvedConfig resolve(const RunConfig& cfg);

RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& cfg);

Method method_from(const std::string& name);
const char* to_string(Method m);
const char* to_string(GlobalPolicy p);
const char* to_string(OverlapPolicy p);

struct RunOutcome {
    nlohmann::json document;  // {"runs": [per-method report...]}
    bool all_verified = true;
    // 0 verified (or verification off), 1 mismatch. Config errors throw.
    int exit_code = 0;
};

// Executes the configured method(s) on the configured workload, verifies
// each final image against the serial oracle, and writes the requested
// report, CSV, trace and file-dump outputs.
RunOutcome run_experiment(const RunConfig& cfg);

// Stable CSV schema: one row per (method, configuration) run.
std::string csv_header();
std::string csv_row(const nlohmann::json& report);

}  // namespace tamio
