#include "tamio/pipeline.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <tuple>

#include "tamio/error.hpp"
#include "tamio/io_phase.hpp"

namespace tamio {

namespace {

// Procs indexed by rank; every rank must appear exactly once and validate.
std::vector<const ProcRequest*> index_by_rank(const std::vector<ProcRequest>& procs,
                                              const Topology& topo) {
    const int p = topo.total_procs();
    if (static_cast<int>(procs.size()) != p)
        throw config_error("pipeline: expected " + std::to_string(p) + " ProcRequests, got " +
                           std::to_string(procs.size()));
    std::vector<const ProcRequest*> by_rank(p, nullptr);
    for (const auto& proc : procs) {
        if (auto v = validate_proc(proc, p))
            throw config_error("rank " + std::to_string(proc.rank) + ": " + v->reason +
                               " at extent " + std::to_string(v->index));
        if (by_rank[proc.rank]) throw config_error("duplicate rank " + std::to_string(proc.rank));
        by_rank[proc.rank] = &proc;
    }
    return by_rank;
}

struct LocalAggOutput {
    int rank = 0;
    std::vector<CoalescedExtent> extents;
};

// Folds one member's delivery to its aggregator into counters and the trace.
void record_delivery(int member, int agg, const ProcRequest& proc, PhaseCounters& intra,
                     std::vector<Message>& trace) {
    const std::uint64_t pairs = proc.requests.extents.size();
    const std::uint64_t md = metadata_bytes(pairs);
    const std::uint64_t data = proc.requests.total_bytes;
    if (member == agg) {
        ++intra.self_metadata_msgs;
        if (data > 0) {
            ++intra.self_data_msgs;
            intra.self_data_bytes += data;
        }
    } else {
        ++intra.remote_metadata_msgs;
        intra.metadata_bytes += md;
        trace.push_back({member, agg, MsgKind::Metadata, md, MsgPhase::Intra, 0});
        if (data > 0) {
            ++intra.remote_data_msgs;
            intra.remote_data_bytes += data;
            trace.push_back({member, agg, MsgKind::Data, data, MsgPhase::Intra, 0});
        }
    }
}

// One local aggregation: merge the member lists, resolve overlaps, coalesce,
// and hand the result over stamped with the aggregator's identity.
LocalAggOutput aggregate_group(int agg, const std::vector<const ProcRequest*>& members,
                               OverlapPolicy policy, PhaseCounters& intra,
                               std::vector<Message>& trace) {
    std::vector<std::vector<Chunk>> lists;
    lists.reserve(members.size());
    std::uint64_t senders = 0;
    std::uint64_t recv_extents = 0;
    for (const auto* proc : members) {
        record_delivery(proc->rank, agg, *proc, intra, trace);
        if (!proc->requests.extents.empty()) ++senders;
        recv_extents += proc->requests.extents.size();
        lists.push_back(chunks_of(*proc));
    }

    MergeResult merged = heap_merge(lists);
    intra.merge_comparisons += merged.comparisons;
    std::vector<Chunk> flat = flatten_overlaps(std::move(merged.chunks), policy);
    CoalesceResult co = coalesce(flat);

    intra.coalesce_extents_in += co.extents_in;
    intra.coalesce_extents_out += co.extents_out;
    intra.senders_sum += senders;
    intra.senders_max = std::max(intra.senders_max, senders);
    intra.recv_extents_sum += recv_extents;
    intra.recv_extents_max = std::max(intra.recv_extents_max, recv_extents);
    ++intra.aggregator_count;

    LocalAggOutput out{agg, std::move(co.extents)};
    for (auto& ext : out.extents)
        for (auto& piece : ext.pieces) piece.sender = agg;
    return out;
}

std::uint64_t compute_max_pending(const std::vector<Message>& trace) {
    // Sends posted before one wait: a member's intra metadata+data together,
    // a local aggregator's whole metadata exchange, and each round's data.
    std::map<std::tuple<MsgPhase, int, int>, std::uint64_t> buckets;
    for (const auto& m : trace) {
        const int round = (m.phase == MsgPhase::Inter && m.kind == MsgKind::Data) ? m.round : -1;
        ++buckets[{m.phase, round, m.src}];
    }
    std::uint64_t best = 0;
    for (const auto& [key, count] : buckets) best = std::max(best, count);
    return best;
}

// Everything after intra-node aggregation: the my-req/others-req exchange,
// the global merge, round planning, and the write.
PipelineResult run_from_local_aggs(std::vector<LocalAggOutput> la_outputs,
                                   const std::vector<const ProcRequest*>& by_rank,
                                   const AggregatorLayout& layout, const StripeConfig& cfg,
                                   const PipelineOptions& opts, PipelineResult result) {
    const int pg = layout.num_global();
    MetricsReport& metrics = result.metrics;

    std::vector<std::vector<std::vector<Chunk>>> inbox(pg);
    std::vector<std::uint64_t> ga_senders(pg, 0);
    std::vector<std::uint64_t> ga_recv_extents(pg, 0);

    for (const auto& la : la_outputs) {
        auto routed = split_by_domain(la.extents, cfg, pg, la.rank);
        metrics.inter_metadata_potential += pg;
        for (int g = 0; g < pg; ++g) {
            if (routed[g].empty()) continue;
            const int dst = layout.global_aggs[g];
            const std::uint64_t md = metadata_bytes(routed[g].size());
            if (la.rank == dst) {
                ++metrics.inter.self_metadata_msgs;
            } else {
                ++metrics.inter.remote_metadata_msgs;
                metrics.inter.metadata_bytes += md;
                result.trace.push_back({la.rank, dst, MsgKind::Metadata, md, MsgPhase::Inter, 0});
            }
            ++ga_senders[g];
            ga_recv_extents[g] += routed[g].size();
            inbox[g].push_back(std::move(routed[g]));
        }
    }

    std::vector<std::vector<CoalescedExtent>> per_agg(pg);
    for (int g = 0; g < pg; ++g) {
        MergeResult merged = heap_merge(inbox[g]);
        metrics.inter.merge_comparisons += merged.comparisons;
        std::vector<Chunk> flat = flatten_overlaps(std::move(merged.chunks), opts.policy);
        CoalesceResult co = coalesce(flat, cfg.stripe_size);
        metrics.inter.coalesce_extents_in += co.extents_in;
        metrics.inter.coalesce_extents_out += co.extents_out;
        metrics.inter.senders_sum += ga_senders[g];
        metrics.inter.senders_max = std::max(metrics.inter.senders_max, ga_senders[g]);
        metrics.inter.recv_extents_sum += ga_recv_extents[g];
        metrics.inter.recv_extents_max = std::max(metrics.inter.recv_extents_max, ga_recv_extents[g]);
        ++metrics.inter.aggregator_count;
        per_agg[g] = std::move(co.extents);
    }

    std::vector<std::uint64_t> seeds(by_rank.size());
    for (std::size_t r = 0; r < by_rank.size(); ++r) seeds[r] = by_rank[r]->fill_seed;

    RoundPlan plan = plan_rounds(per_agg, cfg, opts.stripes_per_round);
    WriteStats stats = execute_write(plan, per_agg, layout.global_aggs, seeds, cfg, opts.policy,
                                     result.file, result.trace, metrics.inter);

    metrics.rounds = plan.total_rounds();
    metrics.bytes_written = stats.bytes_written;
    metrics.max_round_bytes = stats.max_round_bytes;
    for (const auto* proc : by_rank) {
        metrics.total_extents_in += proc->requests.extents.size();
        metrics.total_bytes_in += proc->requests.total_bytes;
    }
    metrics.predicted = predict(metrics.p, metrics.p_l, metrics.p_g,
                                std::max(1.0, metrics.k_mean()));
    sort_trace(result.trace);
    metrics.max_pending_sends = compute_max_pending(result.trace);
    return result;
}

}  // namespace

PipelineResult run_tam(const std::vector<ProcRequest>& procs, const Topology& topo,
                       const AggregatorLayout& layout, const StripeConfig& cfg,
                       const PipelineOptions& opts) {
    check_layout(topo, layout);
    auto by_rank = index_by_rank(procs, topo);

    PipelineResult result;
    result.metrics.method = "tam";
    result.metrics.p = topo.total_procs();
    result.metrics.p_l = layout.num_local();
    result.metrics.p_g = layout.num_global();

    // Intra-node aggregation, node by node, group by group.
    std::vector<LocalAggOutput> la_outputs;
    la_outputs.reserve(layout.local_aggs.size());
    for (int agg : layout.local_aggs) {
        std::vector<const ProcRequest*> members;
        for (int r = agg; r < topo.total_procs() && layout.group_of[r] == agg; ++r)
            members.push_back(by_rank[r]);
        la_outputs.push_back(
            aggregate_group(agg, members, opts.policy, result.metrics.intra, result.trace));
    }

    return run_from_local_aggs(std::move(la_outputs), by_rank, layout, cfg, opts,
                               std::move(result));
}

PipelineResult run_two_phase(const std::vector<ProcRequest>& procs, const Topology& topo,
                             const StripeConfig& cfg, int pg, GlobalPolicy policy, int pick,
                             const PipelineOptions& opts) {
    // Degenerate layout: every process is a local aggregator.
    AggregatorLayout layout = build_layout(topo, topo.procs_per_node, pg, policy, pick);
    auto by_rank = index_by_rank(procs, topo);

    PipelineResult result;
    result.metrics.method = "two_phase";
    result.metrics.p = topo.total_procs();
    result.metrics.p_l = layout.num_local();
    result.metrics.p_g = layout.num_global();

    // The intra gather is skipped outright: each process keeps its own
    // requests, which still get the aggregator-side sort and coalesce.
    std::vector<LocalAggOutput> la_outputs;
    la_outputs.reserve(procs.size());
    for (int rank = 0; rank < topo.total_procs(); ++rank) {
        la_outputs.push_back(aggregate_group(rank, {by_rank[rank]}, opts.policy,
                                             result.metrics.intra, result.trace));
    }

    return run_from_local_aggs(std::move(la_outputs), by_rank, layout, cfg, opts,
                               std::move(result));
}

}  // namespace tamio
