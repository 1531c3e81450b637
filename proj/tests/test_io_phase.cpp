#include <doctest.h>

#include <stdexcept>

#include "tamio/io_phase.hpp"
#include "tamio/oracle.hpp"

using namespace tamio;

namespace {

CoalescedExtent extent_of(std::uint64_t off, std::uint64_t len, int origin, int sender,
                          std::uint64_t pos = 0, std::uint64_t seq = 0) {
    return {off, len, {{off, len, SourceRef{origin, seq, pos}, sender}}};
}

}  // namespace

TEST_CASE("plan_rounds walks accessed stripes in order") {
    StripeConfig cfg{100, 3};

    // Aggregate region of exactly three stripes across three aggregators.
    std::vector<std::vector<CoalescedExtent>> tidy(3);
    for (int g = 0; g < 3; ++g) tidy[g].push_back(extent_of(g * 100, 100, 0, 0));
    auto plan = plan_rounds(tidy, cfg);
    CHECK(plan.total_rounds() == 1);

    // Eight stripes over three aggregators: aggregator 0 owns 0, 3, 6.
    std::vector<std::vector<CoalescedExtent>> eight(3);
    for (std::uint64_t s = 0; s < 8; ++s)
        eight[s % 3].push_back(extent_of(s * 100, 100, 0, 0, s * 100));
    plan = plan_rounds(eight, cfg);
    CHECK(plan.agg_stripes[0] == std::vector<std::uint64_t>{0, 3, 6});
    CHECK(plan.rounds_of(0) == 3);
    CHECK(plan.rounds_of(2) == 2);
    CHECK(plan.total_rounds() == 3);

    // An aggregator with nothing to write has zero rounds.
    std::vector<std::vector<CoalescedExtent>> sparse(3);
    sparse[1].push_back(extent_of(100, 50, 0, 0));
    plan = plan_rounds(sparse, cfg);
    CHECK(plan.rounds_of(0) == 0);
    CHECK(plan.rounds_of(1) == 1);

    // Two stripes per round halves the round count.
    plan = plan_rounds(eight, cfg, 2);
    CHECK(plan.rounds_of(0) == 2);
    CHECK(plan.total_rounds() == 2);
}

TEST_CASE("placement map for a single source") {
    auto ext = extent_of(0, 64, 0, 7);
    auto map = build_placement_map({&ext});
    REQUIRE(map.entries.size() == 1);
    CHECK(map.entries[0] == PlacementEntry{7, 0, 64, 0});
    CHECK(map.buffer_bytes == 64);
}

TEST_CASE("placement map interleaves two senders with disjoint destinations") {
    CoalescedExtent ext{0, 64, {}};
    ext.pieces.push_back({0, 32, SourceRef{0, 0, 0}, 3});
    ext.pieces.push_back({32, 32, SourceRef{1, 0, 0}, 9});
    auto map = build_placement_map({&ext});
    REQUIRE(map.entries.size() == 2);
    CHECK(map.entries[0] == PlacementEntry{3, 0, 32, 0});
    CHECK(map.entries[1] == PlacementEntry{9, 0, 32, 32});
}

TEST_CASE("placement map coalesces same-source contiguous runs") {
    CoalescedExtent ext{0, 48, {}};
    ext.pieces.push_back({0, 16, SourceRef{0, 0, 0}, 3});
    ext.pieces.push_back({16, 16, SourceRef{0, 1, 16}, 3});
    ext.pieces.push_back({32, 16, SourceRef{1, 0, 0}, 9});
    auto map = build_placement_map({&ext});
    REQUIRE(map.entries.size() == 2);  // never more entries than pieces
    CHECK(map.entries[0] == PlacementEntry{3, 0, 32, 0});
    CHECK(map.entries[1] == PlacementEntry{9, 0, 16, 32});
}

TEST_CASE("placement destinations tile the buffer across extents") {
    auto a = extent_of(0, 10, 0, 1);
    auto b = extent_of(50, 6, 2, 2);  // gap in the file, dense in the buffer
    auto map = build_placement_map({&a, &b});
    REQUIRE(map.entries.size() == 2);
    CHECK(map.entries[0].dest_offset == 0);
    CHECK(map.entries[1].dest_offset == 10);
    CHECK(map.buffer_bytes == 16);
}

TEST_CASE("execute_write places one extent byte-exactly") {
    StripeConfig cfg{4096, 1};
    std::vector<std::vector<CoalescedExtent>> per_agg{{extent_of(0, 8, 0, 0)}};
    auto plan = plan_rounds(per_agg, cfg);

    SimFile file;
    std::vector<Message> trace;
    PhaseCounters inter;
    auto stats = execute_write(plan, per_agg, {0}, {0}, cfg, OverlapPolicy::Strict, file, trace,
                               inter);
    CHECK(stats.bytes_written == 8);
    CHECK(stats.rounds_executed == 1);
    auto bytes = file.read(0, 8);
    REQUIRE(bytes);
    for (int j = 0; j < 8; ++j) CHECK((*bytes)[j] == fill_byte(0, j));
}

TEST_CASE("execute_write matches the oracle for four disjoint writers") {
    std::vector<ProcRequest> procs;
    for (int r = 0; r < 4; ++r)
        procs.push_back({r, RequestList::from_extents({{std::uint64_t(r) * 64, 64}}),
                         std::uint64_t(r)});

    StripeConfig cfg{128, 2};
    // Route by stripe by hand: stripe s of [0, 256) belongs to agg s % 2.
    std::vector<std::vector<CoalescedExtent>> per_agg(2);
    for (int r = 0; r < 4; ++r) {
        const std::uint64_t off = std::uint64_t(r) * 64;
        const int g = int(stripe_of(off, cfg) % 2);
        auto& list = per_agg[g];
        if (!list.empty() && list.back().end() == off) {
            list.back().pieces.push_back({off, 64, SourceRef{r, 0, 0}, r});
            list.back().length += 64;
        } else {
            list.push_back(extent_of(off, 64, r, r));
        }
    }

    SimFile file;
    std::vector<Message> trace;
    PhaseCounters inter;
    execute_write(plan_rounds(per_agg, cfg), per_agg, {0, 1}, {0, 1, 2, 3}, cfg,
                  OverlapPolicy::Strict, file, trace, inter);
    CHECK_FALSE(compare(file, serial_oracle(procs)));
    // per-round volume respected the stripe size
    PhaseCounters fresh;
    CHECK(inter.remote_data_msgs + inter.self_data_msgs == 4);
}

TEST_CASE("discipline check fires on misrouted extents") {
    StripeConfig cfg{100, 2};
    // Stripe 1 handed to aggregator 0: structurally wrong.
    std::vector<std::vector<CoalescedExtent>> per_agg(2);
    per_agg[0].push_back(extent_of(100, 50, 0, 0));
    auto plan = plan_rounds(per_agg, cfg);

    SimFile file;
    std::vector<Message> trace;
    PhaseCounters inter;
    CHECK_THROWS_AS(execute_write(plan, per_agg, {0, 1}, {0}, cfg, OverlapPolicy::Strict, file,
                                  trace, inter),
                    std::logic_error);
}

TEST_CASE("round volume stays within the collective buffer") {
    StripeConfig cfg{64, 1};
    std::vector<std::vector<CoalescedExtent>> per_agg(1);
    // three full stripes, one aggregator
    for (std::uint64_t s = 0; s < 3; ++s)
        per_agg[0].push_back(extent_of(s * 64, 64, 0, 0, s * 64));

    SimFile file;
    std::vector<Message> trace;
    PhaseCounters inter;
    auto stats = execute_write(plan_rounds(per_agg, cfg), per_agg, {0}, {0}, cfg,
                               OverlapPolicy::Strict, file, trace, inter);
    CHECK(stats.rounds_executed == 3);
    CHECK(stats.max_round_bytes == 64);
    CHECK(stats.bytes_written == 192);
}
