#include "tamio/io_phase.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include "tamio/error.hpp"

namespace tamio {

RoundPlan plan_rounds(const std::vector<std::vector<CoalescedExtent>>& per_agg,
                      const StripeConfig& cfg, std::uint64_t stripes_per_round) {
    if (stripes_per_round < 1) throw config_error("plan_rounds: stripes_per_round must be >= 1");
    RoundPlan plan;
    plan.stripes_per_round = stripes_per_round;
    plan.agg_stripes.resize(per_agg.size());
    for (std::size_t g = 0; g < per_agg.size(); ++g) {
        auto& stripes = plan.agg_stripes[g];
        for (const auto& ext : per_agg[g]) {
            // Extents of one aggregator never cross stripes, so the first
            // byte's stripe is the extent's stripe.
            const std::uint64_t s = stripe_of(ext.offset, cfg);
            if (stripes.empty() || stripes.back() != s) stripes.push_back(s);
        }
    }
    return plan;
}

PlacementMap build_placement_map(const std::vector<const CoalescedExtent*>& round_extents) {
    PlacementMap map;
    std::map<int, std::uint64_t> msg_cursor;  // per-sender pack position
    std::uint64_t dest = 0;
    for (const auto* ext : round_extents) {
        for (const auto& piece : ext->pieces) {
            const std::uint64_t piece_dest = dest + (piece.offset - ext->offset);
            std::uint64_t& cursor = msg_cursor[piece.sender];
            auto& entries = map.entries;
            if (!entries.empty() && entries.back().src == piece.sender &&
                entries.back().src_offset + entries.back().length == cursor &&
                entries.back().dest_offset + entries.back().length == piece_dest) {
                entries.back().length += piece.length;
            } else {
                entries.push_back({piece.sender, cursor, piece.length, piece_dest});
            }
            cursor += piece.length;
        }
        dest += ext->length;
    }
    map.buffer_bytes = dest;
    return map;
}

namespace {

[[noreturn]] void discipline_failure(const std::string& what) {
    // Stripe-round discipline is a structural property of the pipeline; a
    // violation is a bug, not a configuration problem.
    throw std::logic_error("stripe-round discipline violated: " + what);
}

}  // namespace

WriteStats execute_write(const RoundPlan& plan,
                         const std::vector<std::vector<CoalescedExtent>>& per_agg,
                         const std::vector<int>& agg_ranks,
                         const std::vector<std::uint64_t>& fill_seed_of_rank,
                         const StripeConfig& cfg, OverlapPolicy policy, SimFile& file,
                         std::vector<Message>& trace, PhaseCounters& inter) {
    const int pg = static_cast<int>(per_agg.size());
    WriteStats stats;
    const std::uint64_t round_capacity = plan.stripes_per_round * cfg.stripe_size;

    for (int g = 0; g < pg; ++g) {
        const auto& extents = per_agg[g];
        std::size_t next_extent = 0;
        for (int round = 0; round < plan.rounds_of(g); ++round) {
            const std::uint64_t first = round * plan.stripes_per_round;
            const std::uint64_t last = std::min<std::uint64_t>(first + plan.stripes_per_round,
                                                               plan.agg_stripes[g].size());

            std::vector<const CoalescedExtent*> round_extents;
            std::uint64_t round_bytes = 0;
            for (std::uint64_t si = first; si < last; ++si) {
                const std::uint64_t stripe = plan.agg_stripes[g][si];
                if (stripe % static_cast<std::uint64_t>(pg) != static_cast<std::uint64_t>(g))
                    discipline_failure("aggregator " + std::to_string(g) + " scheduled stripe " +
                                       std::to_string(stripe));
                while (next_extent < extents.size() &&
                       stripe_of(extents[next_extent].offset, cfg) == stripe) {
                    const auto& ext = extents[next_extent];
                    if (stripe_of(ext.end() - 1, cfg) != stripe)
                        discipline_failure("extent crosses its stripe");
                    round_extents.push_back(&ext);
                    round_bytes += ext.length;
                    ++next_extent;
                }
            }
            if (round_bytes > round_capacity)
                discipline_failure("round bytes exceed the collective buffer");

            PlacementMap map = build_placement_map(round_extents);

            // Pack each sender's message for this round from its pieces, in
            // the sender's own (file offset) order.
            std::map<int, std::vector<std::uint8_t>> messages;
            for (const auto* ext : round_extents) {
                for (const auto& piece : ext->pieces) {
                    auto& msg = messages[piece.sender];
                    const std::uint64_t seed = fill_seed_of_rank[piece.src.rank];
                    for (std::uint64_t j = 0; j < piece.length; ++j)
                        msg.push_back(fill_byte(seed, piece.src.pos + j));
                }
            }

            // Receive through the placement map into the contiguous buffer.
            std::vector<std::uint8_t> buffer(map.buffer_bytes);
            for (const auto& entry : map.entries) {
                const auto& msg = messages.at(entry.src);
                std::copy_n(msg.begin() + static_cast<std::ptrdiff_t>(entry.src_offset),
                            entry.length,
                            buffer.begin() + static_cast<std::ptrdiff_t>(entry.dest_offset));
            }

            for (const auto& [sender, msg] : messages) {
                const bool self = sender == agg_ranks[g];
                if (self) {
                    ++inter.self_data_msgs;
                    inter.self_data_bytes += msg.size();
                } else {
                    ++inter.remote_data_msgs;
                    inter.remote_data_bytes += msg.size();
                    trace.push_back({sender, agg_ranks[g], MsgKind::Data, msg.size(),
                                     MsgPhase::Inter, round});
                }
            }

            // Flush the buffer to the file, one write per coalesced extent.
            std::uint64_t dest = 0;
            for (const auto* ext : round_extents) {
                file.write(ext->offset,
                           std::span<const std::uint8_t>(buffer.data() + dest, ext->length),
                           policy == OverlapPolicy::LastWriter);
                dest += ext->length;
            }

            stats.bytes_written += round_bytes;
            stats.max_round_bytes = std::max(stats.max_round_bytes, round_bytes);
            ++stats.rounds_executed;
        }
        if (next_extent != extents.size())
            discipline_failure("extents left unscheduled for aggregator " + std::to_string(g));
    }
    return stats;
}

}  // namespace tamio
