#pragma once

#include <cstdint>
#include <vector>

#include "tamio/algebra.hpp"
#include "tamio/message.hpp"
#include "tamio/metrics.hpp"
#include "tamio/sim_file.hpp"
#include "tamio/topology.hpp"

namespace tamio {

// Round schedule: aggregator g handles its accessed stripes in ascending
// order, stripes_per_round of them per round. With the default of one, each
// round writes at most one stripe of data, as the collective-buffer
// discipline requires.
struct RoundPlan {
    std::uint64_t stripes_per_round = 1;
    std::vector<std::vector<std::uint64_t>> agg_stripes;  // per aggregator, ascending

    int rounds_of(int g) const {
        const auto n = agg_stripes[g].size();
        return static_cast<int>((n + stripes_per_round - 1) / stripes_per_round);
    }
    int total_rounds() const {
        int r = 0;
        for (std::size_t g = 0; g < agg_stripes.size(); ++g) r = std::max(r, rounds_of(int(g)));
        return r;
    }
};

RoundPlan plan_rounds(const std::vector<std::vector<CoalescedExtent>>& per_agg,
                      const StripeConfig& cfg, std::uint64_t stripes_per_round = 1);

// One receive-placement instruction: length bytes taken at src_offset of the
// message from local aggregator src land at dest_offset of the round's
// contiguous write buffer. The simulator's analog of an MPI derived datatype.
struct PlacementEntry {
    int src = 0;
    std::uint64_t src_offset = 0;
    std::uint64_t length = 0;
    std::uint64_t dest_offset = 0;

    friend bool operator==(const PlacementEntry&, const PlacementEntry&) = default;
};

struct PlacementMap {
    std::vector<PlacementEntry> entries;  // ordered by dest_offset
    std::uint64_t buffer_bytes = 0;
};

// Builds the placement map for one aggregator round. Entries are emitted in
// destination order, maximally coalesced: consecutive entries never share a
// source while being contiguous in both message and buffer. Destination
// ranges are disjoint and tile [0, buffer_bytes).
PlacementMap build_placement_map(const std::vector<const CoalescedExtent*>& round_extents);

struct WriteStats {
    std::uint64_t bytes_written = 0;
    std::uint64_t max_round_bytes = 0;
    std::uint64_t rounds_executed = 0;
};

// Runs every round of every aggregator: packs each sender's per-round
// message from its origin streams, places it into the round buffer through
// the placement map, and writes the buffer out to the file. Emits one inter
// data message per (sender, aggregator, round) with data. Enforces the
// stripe discipline as unconditional runtime checks: per-aggregator round
// bytes never exceed stripes_per_round * stripe_size and every written byte
// of aggregator g lies in a stripe congruent to g mod P_G.
WriteStats execute_write(const RoundPlan& plan,
                         const std::vector<std::vector<CoalescedExtent>>& per_agg,
                         const std::vector<int>& agg_ranks,
                         const std::vector<std::uint64_t>& fill_seed_of_rank,
                         const StripeConfig& cfg, OverlapPolicy policy, SimFile& file,
                         std::vector<Message>& trace, PhaseCounters& inter);

}  // namespace tamio
