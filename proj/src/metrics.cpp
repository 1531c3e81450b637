#include "tamio/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "tamio/error.hpp"

namespace tamio {

void PhaseCounters::merge(const PhaseCounters& other) {
    remote_metadata_msgs += other.remote_metadata_msgs;
    remote_data_msgs += other.remote_data_msgs;
    self_metadata_msgs += other.self_metadata_msgs;
    self_data_msgs += other.self_data_msgs;
    metadata_bytes += other.metadata_bytes;
    remote_data_bytes += other.remote_data_bytes;
    self_data_bytes += other.self_data_bytes;
    merge_comparisons += other.merge_comparisons;
    coalesce_extents_in += other.coalesce_extents_in;
    coalesce_extents_out += other.coalesce_extents_out;
    senders_sum += other.senders_sum;
    senders_max = std::max(senders_max, other.senders_max);
    aggregator_count += other.aggregator_count;
    recv_extents_sum += other.recv_extents_sum;
    recv_extents_max = std::max(recv_extents_max, other.recv_extents_max);
}

Prediction predict(std::uint64_t p, std::uint64_t pl, std::uint64_t pg, double k) {
    if (p < 1 || pl < 1 || pg < 1 || k < 1)
        throw config_error("predict: all arguments must be >= 1");
    Prediction out;
    out.intra_receives_per_local_agg = double(p) / double(pl);
    out.inter_receives_per_global_agg = double(pl) / double(pg);
    out.two_phase_receives_per_global_agg = double(p) / double(pg);
    const double pk = double(p) * k;
    out.intra_sort_surrogate = pk / double(pl) * std::log2(double(p) / double(pl));
    out.inter_sort_surrogate = pk / double(pg) * std::log2(double(pl));
    out.two_phase_sort_surrogate = pk / double(pg) * std::log2(double(p));
    return out;
}

void MetricsReport::merge(const MetricsReport& other) {
    intra.merge(other.intra);
    inter.merge(other.inter);
    inter_metadata_potential += other.inter_metadata_potential;
    rounds = std::max(rounds, other.rounds);
    bytes_written += other.bytes_written;
    max_round_bytes = std::max(max_round_bytes, other.max_round_bytes);
    total_extents_in += other.total_extents_in;
    total_bytes_in += other.total_bytes_in;
    max_pending_sends = std::max(max_pending_sends, other.max_pending_sends);
}

namespace {

nlohmann::json phase_json(const PhaseCounters& c) {
    return {
        {"remote_metadata_msgs", c.remote_metadata_msgs},
        {"remote_data_msgs", c.remote_data_msgs},
        {"self_metadata_msgs", c.self_metadata_msgs},
        {"self_data_msgs", c.self_data_msgs},
        {"metadata_bytes", c.metadata_bytes},
        {"remote_data_bytes", c.remote_data_bytes},
        {"self_data_bytes", c.self_data_bytes},
        {"merge_comparisons", c.merge_comparisons},
        {"coalesce_extents_in", c.coalesce_extents_in},
        {"coalesce_extents_out", c.coalesce_extents_out},
        {"coalesce_ratio", c.coalesce_ratio()},
        {"senders_per_aggregator_max", c.senders_max},
        {"senders_per_aggregator_mean", c.senders_mean()},
        {"recv_extents_per_aggregator_max", c.recv_extents_max},
        {"recv_extents_per_aggregator_mean", c.recv_extents_mean()},
        {"aggregator_count", c.aggregator_count},
    };
}

}  // namespace

nlohmann::json MetricsReport::to_json() const {
    return {
        {"method", method},
        {"p", p},
        {"p_l", p_l},
        {"p_g", p_g},
        {"k_mean_extents_per_proc", k_mean()},
        {"total_extents_in", total_extents_in},
        {"total_bytes_in", total_bytes_in},
        {"intra", phase_json(intra)},
        {"inter", phase_json(inter)},
        {"inter_metadata_potential", inter_metadata_potential},
        {"io", {{"rounds", rounds},
                {"bytes_written", bytes_written},
                {"max_round_bytes", max_round_bytes}}},
        {"max_pending_sends", max_pending_sends},
        {"predicted",
         {{"intra_receives_per_local_agg", predicted.intra_receives_per_local_agg},
          {"inter_receives_per_global_agg", predicted.inter_receives_per_global_agg},
          {"two_phase_receives_per_global_agg", predicted.two_phase_receives_per_global_agg},
          {"intra_sort_surrogate", predicted.intra_sort_surrogate},
          {"inter_sort_surrogate", predicted.inter_sort_surrogate},
          {"two_phase_sort_surrogate", predicted.two_phase_sort_surrogate}}},
    };
}

std::vector<CheckVerdict> check(const MetricsReport& m) {
    std::vector<CheckVerdict> out;
    const bool two_phase = m.method == "two_phase";

    auto count_row = [&](std::string name, double measured, double predicted) {
        CheckVerdict v{std::move(name), measured, predicted, "", false};
        if (measured == predicted) {
            v.relation = "exact";
            v.pass = true;
        } else {
            v.relation = "upper_bound";
            v.pass = measured <= predicted;
        }
        out.push_back(std::move(v));
    };
    auto ratio_row = [&](std::string name, double measured, double surrogate) {
        CheckVerdict v{std::move(name), measured, surrogate, "ratio", false};
        v.pass = surrogate == 0 ? measured == 0 : measured / surrogate <= 2.0;
        out.push_back(std::move(v));
    };

    count_row("intra_senders_per_local_agg_mean", m.intra.senders_mean(),
              m.predicted.intra_receives_per_local_agg);
    count_row("intra_senders_per_local_agg_max", double(m.intra.senders_max),
              std::ceil(m.predicted.intra_receives_per_local_agg));
    // Distinct-sender congestion bound at the global aggregators: P_L under
    // two-layer aggregation, P under two-phase (equality when every sender
    // holds data for every file domain).
    count_row(two_phase ? "two_phase_senders_per_global_agg_max" : "inter_senders_per_global_agg_max",
              double(m.inter.senders_max), two_phase ? double(m.p) : double(m.p_l));
    ratio_row("intra_merge_comparisons_per_local_agg",
              m.intra.aggregator_count ? double(m.intra.merge_comparisons) / double(m.intra.aggregator_count)
                                       : 0.0,
              m.predicted.intra_sort_surrogate);
    ratio_row("inter_merge_comparisons_per_global_agg",
              m.inter.aggregator_count ? double(m.inter.merge_comparisons) / double(m.inter.aggregator_count)
                                       : 0.0,
              two_phase ? m.predicted.two_phase_sort_surrogate : m.predicted.inter_sort_surrogate);
    return out;
}

nlohmann::json to_json(const std::vector<CheckVerdict>& verdicts) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : verdicts)
        arr.push_back({{"counter", v.counter},
                       {"measured", v.measured},
                       {"predicted", v.predicted},
                       {"relation", v.relation},
                       {"pass", v.pass}});
    return arr;
}

}  // namespace tamio
