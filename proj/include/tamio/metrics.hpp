#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tamio {

// Counters of one aggregation phase. Aggregator-level statistics are kept as
// (sum, max, count) so partial reports combine associatively.
struct PhaseCounters {
    std::uint64_t remote_metadata_msgs = 0;
    std::uint64_t remote_data_msgs = 0;
    std::uint64_t self_metadata_msgs = 0;
    std::uint64_t self_data_msgs = 0;
    std::uint64_t metadata_bytes = 0;
    std::uint64_t remote_data_bytes = 0;
    std::uint64_t self_data_bytes = 0;
    std::uint64_t merge_comparisons = 0;
    std::uint64_t coalesce_extents_in = 0;
    std::uint64_t coalesce_extents_out = 0;
    // distinct nonempty senders per aggregator of this phase
    std::uint64_t senders_sum = 0;
    std::uint64_t senders_max = 0;
    std::uint64_t aggregator_count = 0;
    // extents arriving per aggregator before coalescing
    std::uint64_t recv_extents_sum = 0;
    std::uint64_t recv_extents_max = 0;

    double senders_mean() const {
        return aggregator_count ? double(senders_sum) / double(aggregator_count) : 0.0;
    }
    double recv_extents_mean() const {
        return aggregator_count ? double(recv_extents_sum) / double(aggregator_count) : 0.0;
    }
    double coalesce_ratio() const {
        return coalesce_extents_out ? double(coalesce_extents_in) / double(coalesce_extents_out)
                                    : 0.0;
    }

    void merge(const PhaseCounters& other);

    friend bool operator==(const PhaseCounters&, const PhaseCounters&) = default;
};

// Analytic figures for a (P, P_L, P_G, k) configuration. Receive counts are
// the per-aggregator averages; sort surrogates evaluate the complexity
// expressions with constant 1 and log base 2.
struct Prediction {
    double intra_receives_per_local_agg = 0;       // P / P_L
    double inter_receives_per_global_agg = 0;      // P_L / P_G
    double two_phase_receives_per_global_agg = 0;  // P / P_G
    double intra_sort_surrogate = 0;               // (P k / P_L) log2(P / P_L)
    double inter_sort_surrogate = 0;               // (P k / P_G) log2(P_L)
    double two_phase_sort_surrogate = 0;           // (P k / P_G) log2(P)

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

Prediction predict(std::uint64_t p, std::uint64_t pl, std::uint64_t pg, double k);

struct MetricsReport {
    // configuration echo
    std::string method;
    std::uint64_t p = 0, p_l = 0, p_g = 0;

    PhaseCounters intra;
    PhaseCounters inter;
    std::uint64_t inter_metadata_potential = 0;  // P_L * P_G pairwise slots

    std::uint64_t rounds = 0;
    std::uint64_t bytes_written = 0;
    std::uint64_t max_round_bytes = 0;

    std::uint64_t total_extents_in = 0;
    std::uint64_t total_bytes_in = 0;
    std::uint64_t max_pending_sends = 0;

    Prediction predicted;

    // mean pre-aggregation extents per process
    double k_mean() const { return p ? double(total_extents_in) / double(p) : 0.0; }

    // Associative, commutative combine of partial reports.
    void merge(const MetricsReport& other);

    nlohmann::json to_json() const;
};

// Outcome of comparing one measured counter against its prediction.
//   exact       — counts match the prediction exactly (all senders nonempty)
//   upper_bound — measured <= predicted (sparse senders)
//   ratio       — measured / predicted <= 2 (comparison-count surrogates)
struct CheckVerdict {
    std::string counter;
    double measured = 0;
    double predicted = 0;
    std::string relation;
    bool pass = false;
};

// Compares the measured congestion and sort-work counters against the
// analytic predictions. Count-type rows check the exact sender-count bounds
// (P/P_L per local aggregator, P_L or P distinct senders per global
// aggregator); surrogate rows use the 2x ratio bound.
std::vector<CheckVerdict> check(const MetricsReport& measured);

nlohmann::json to_json(const std::vector<CheckVerdict>& verdicts);

}  // namespace tamio
