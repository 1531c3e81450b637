#pragma once

#include <vector>

#include "tamio/algebra.hpp"
#include "tamio/layout.hpp"
#include "tamio/message.hpp"
#include "tamio/metrics.hpp"
#include "tamio/sim_file.hpp"
#include "tamio/topology.hpp"

namespace tamio {

struct PipelineOptions {
    OverlapPolicy policy = OverlapPolicy::Strict;
    std::uint64_t stripes_per_round = 1;
};

struct PipelineResult {
    SimFile file;
    MetricsReport metrics;
    std::vector<Message> trace;  // canonically sorted; self-deliveries excluded
};

// Two-layer aggregation: every process delivers its requests to its node's
// local aggregator, the aggregators merge-sort and coalesce, split the
// result across the file domains, exchange with the global aggregators, and
// the round-based write runs. Requires exactly one ProcRequest per rank.
PipelineResult run_tam(const std::vector<ProcRequest>& procs, const Topology& topo,
                       const AggregatorLayout& layout, const StripeConfig& cfg,
                       const PipelineOptions& opts = {});

// Classic two-phase: the same pipeline with the intra-node gather skipped —
// every process acts as its own local aggregator (P_L = P) and enters the
// inter-node exchange directly.
PipelineResult run_two_phase(const std::vector<ProcRequest>& procs, const Topology& topo,
                             const StripeConfig& cfg, int pg, GlobalPolicy policy,
                             int pick = 0, const PipelineOptions& opts = {});

}  // namespace tamio
