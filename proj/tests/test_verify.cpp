#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "tamio/error.hpp"
#include "tamio/oracle.hpp"
#include "tamio/run.hpp"

using namespace tamio;

TEST_CASE("oracle fill values by hand") {
    std::vector<ProcRequest> procs{{0, RequestList::from_extents({{0, 2}}), 0}};
    auto file = serial_oracle(procs);
    CHECK(*file.read_byte(0) == 5);
    CHECK(*file.read_byte(1) == 18);

    // stream position carries across a rank's extents
    std::vector<ProcRequest> split{{0, RequestList::from_extents({{0, 2}, {10, 2}}), 0}};
    auto file2 = serial_oracle(split);
    CHECK(*file2.read_byte(10) == fill_byte(0, 2));
    CHECK(*file2.read_byte(11) == fill_byte(0, 3));
}

TEST_CASE("oracle of an empty request set is an empty file") {
    std::vector<ProcRequest> procs{{0, RequestList{}, 0}};
    auto file = serial_oracle(procs);
    CHECK(file.written_bytes() == 0);
    CHECK(file.written_extents().empty());
}

TEST_CASE("oracle overlap handling") {
    std::vector<ProcRequest> procs{{2, RequestList::from_extents({{100, 8}}), 2},
                                   {5, RequestList::from_extents({{104, 8}}), 5}};
    CHECK_THROWS_AS(serial_oracle(procs, OverlapPolicy::Strict), overlap_error);

    auto file = serial_oracle(procs, OverlapPolicy::LastWriter);
    CHECK(*file.read_byte(104) == fill_byte(5, 0));  // rank 5 lands last
    CHECK(*file.read_byte(100) == fill_byte(2, 0));
}

TEST_CASE("compare finds the first divergence") {
    SimFile a, b;
    std::vector<std::uint8_t> bytes(200);
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = std::uint8_t(i);
    a.write(0, bytes);
    b.write(0, bytes);
    CHECK_FALSE(compare(a, b));

    // flip one byte
    std::vector<std::uint8_t> flip{0xFF};
    b.write(100, flip);
    auto div = compare(a, b);
    REQUIRE(div);
    CHECK(div->offset == 100);
    CHECK(*div->byte_a == 100);
    CHECK(*div->byte_b == 0xFF);
}

TEST_CASE("compare reports written-vs-unwritten at the extent start") {
    SimFile a, b;
    std::vector<std::uint8_t> data{1, 2, 3};
    a.write(50, data);
    a.write(500, data);
    b.write(50, data);
    auto div = compare(a, b);
    REQUIRE(div);
    CHECK(div->offset == 500);
    CHECK(div->byte_a);
    CHECK_FALSE(div->byte_b);

    // symmetric direction
    auto div2 = compare(b, a);
    REQUIRE(div2);
    CHECK(div2->offset == 500);
    CHECK_FALSE(div2->byte_a);
}

TEST_CASE("config resolution catches field errors") {
    RunConfig cfg;
    cfg.nodes = 3;
    cfg.procs = 8;  // not divisible
    CHECK_THROWS_WITH_AS(resolve(cfg), "procs: not divisible by nodes", config_error);

    cfg = RunConfig{};
    cfg.nodes = 2;
    cfg.procs_per_node = 4;
    cfg.aggs_per_node = 5;  // c > q
    CHECK_THROWS_AS(resolve(cfg), config_error);

    cfg = RunConfig{};
    cfg.nodes = 2;
    cfg.procs_per_node = 2;
    cfg.p_g = 3;
    cfg.stripe_count = 4;  // must equal p_g
    CHECK_THROWS_AS(resolve(cfg), config_error);

    cfg = RunConfig{};
    cfg.nodes = 2;
    cfg.procs_per_node = 2;
    cfg.p_l = 3;  // not a multiple of nodes
    CHECK_THROWS_AS(resolve(cfg), config_error);
}

TEST_CASE("config defaults: one aggregator per node, stripe count matches") {
    RunConfig cfg;
    cfg.nodes = 4;
    cfg.procs_per_node = 2;
    auto rc = resolve(cfg);
    CHECK(rc.p_g == 4);
    CHECK(rc.stripe.stripe_count == 4);
    CHECK(rc.topo.total_procs() == 8);

    cfg.p_l = 8;  // c = 2 via P_L
    rc = resolve(cfg);
    CHECK(rc.aggs_per_node == 2);
}

TEST_CASE("config json round-trip") {
    RunConfig cfg;
    cfg.workload.kind = WorkloadKind::BTIO;
    cfg.workload.n = 16;
    cfg.workload.vars = 12;
    cfg.nodes = 4;
    cfg.procs_per_node = 4;
    cfg.aggs_per_node = 2;
    cfg.p_g = 3;
    cfg.stripe_size = 4096;
    cfg.policy = GlobalPolicy::RoundRobinAcrossNodes;
    cfg.overlap = OverlapPolicy::LastWriter;
    cfg.method = Method::Tam;
    cfg.seed = 99;
    cfg.verify = false;

    auto back = config_from_json(config_to_json(cfg));
    CHECK(config_to_json(back) == config_to_json(cfg));
    CHECK(back.workload.kind == WorkloadKind::BTIO);
    CHECK(back.policy == GlobalPolicy::RoundRobinAcrossNodes);
    CHECK(back.overlap == OverlapPolicy::LastWriter);
    CHECK_FALSE(back.verify);
}

TEST_CASE("run_experiment verifies both methods and is deterministic") {
    RunConfig cfg;
    cfg.workload.kind = WorkloadKind::Contiguous1D;
    cfg.workload.block_bytes = 512;
    cfg.nodes = 2;
    cfg.procs_per_node = 4;
    cfg.aggs_per_node = 2;
    cfg.p_g = 2;
    cfg.stripe_size = 256;
    cfg.method = Method::Both;

    auto first = run_experiment(cfg);
    CHECK(first.exit_code == 0);
    CHECK(first.all_verified);
    REQUIRE(first.document["runs"].size() == 2);
    for (const auto& report : first.document["runs"])
        CHECK(report["verification"]["equal"] == true);

    // TAM's congestion at the global aggregators never exceeds two-phase's.
    const auto& tam = first.document["runs"][0];
    const auto& two_phase = first.document["runs"][1];
    CHECK(tam["metrics"]["inter"]["senders_per_aggregator_max"].get<std::uint64_t>() <=
          two_phase["metrics"]["inter"]["senders_per_aggregator_max"].get<std::uint64_t>());
    CHECK(tam["metrics"]["inter"]["remote_metadata_msgs"].get<std::uint64_t>() <=
          two_phase["metrics"]["inter"]["remote_metadata_msgs"].get<std::uint64_t>());

    // byte-identical reports on a repeat run
    auto second = run_experiment(cfg);
    CHECK(first.document.dump() == second.document.dump());
}

TEST_CASE("run_experiment csv and report files") {
    const std::string out = "run_report.json";
    const std::string csv = "run_rows.csv";
    std::remove(out.c_str());
    std::remove(csv.c_str());

    RunConfig cfg;
    cfg.workload.kind = WorkloadKind::Contiguous1D;
    cfg.workload.block_bytes = 128;
    cfg.nodes = 2;
    cfg.procs_per_node = 2;
    cfg.p_g = 2;
    cfg.stripe_size = 64;
    cfg.out_path = out;
    cfg.csv_path = csv;

    auto outcome = run_experiment(cfg);
    CHECK(outcome.exit_code == 0);

    std::ifstream jin(out);
    REQUIRE(jin.good());
    nlohmann::json doc;
    jin >> doc;
    CHECK(doc["runs"].size() == 2);
    for (const auto& report : doc["runs"]) CHECK(csv_row(report).find("true") != std::string::npos);

    std::ifstream cin_(csv);
    std::string header;
    std::getline(cin_, header);
    CHECK(header == csv_header());
    int rows = 0;
    for (std::string line; std::getline(cin_, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 2);

    std::remove(out.c_str());
    std::remove(csv.c_str());
}

TEST_CASE("pipeline equals oracle across random configurations") {
    std::mt19937 rng(99);
    const std::string fixture = TAMIO_DATA_DIR "/e3sm_like_decomp.json";
    int verified = 0;
    while (verified < 30) {
        const int nodes = 1 + int(rng() % 4);
        const int q = 1 + int(rng() % 6);
        const int p = nodes * q;
        const int c = 1 + int(rng() % q);
        const int pg = 1 + int(rng() % p);
        const StripeConfig cfg{std::uint64_t{1} << (5 + rng() % 7), pg};
        const auto policy = rng() % 2 ? GlobalPolicy::SpreadEven
                                      : GlobalPolicy::RoundRobinAcrossNodes;

        std::vector<ProcRequest> procs;
        if (rng() % 2) {
            procs = gen_contiguous1d(p, 1 + rng() % 3000);
        } else {
            if (p > 10) continue;
            procs = load_decomp(fixture, p);
        }

        const Topology topo{nodes, q};
        auto oracle = serial_oracle(procs);
        auto layout = build_layout(topo, c, pg, policy);
        CHECK_FALSE(compare(run_tam(procs, topo, layout, cfg).file, oracle));
        CHECK_FALSE(compare(run_two_phase(procs, topo, cfg, pg, policy).file, oracle));
        ++verified;
    }
}

TEST_CASE("overlap under strict policy aborts the experiment") {
    const std::string overlapping = "overlap_decomp.json";
    {
        std::ofstream out(overlapping);
        out << R"({"element_size": 4, "total_elements": 16, "procs": [)"
            << R"({"rank": 0, "offsets": [0], "lengths": [4]},)"
            << R"({"rank": 1, "offsets": [2], "lengths": [4]}]})";
    }
    RunConfig cfg;
    cfg.workload.kind = WorkloadKind::DecompFile;
    cfg.workload.path = overlapping;
    cfg.nodes = 1;
    cfg.procs_per_node = 2;
    cfg.p_g = 1;
    cfg.stripe_size = 64;
    CHECK_THROWS_AS(run_experiment(cfg), overlap_error);

    // last-writer resolves it instead; rank 1 owns the contested bytes
    cfg.overlap = OverlapPolicy::LastWriter;
    auto outcome = run_experiment(cfg);
    CHECK(outcome.exit_code == 0);
    CHECK(outcome.all_verified);
    std::remove(overlapping.c_str());
}

TEST_CASE("trace files hold one canonically ordered message per line") {
    RunConfig cfg;
    cfg.workload.kind = WorkloadKind::Contiguous1D;
    cfg.workload.block_bytes = 512;
    cfg.nodes = 2;
    cfg.procs_per_node = 4;
    cfg.p_g = 2;
    cfg.stripe_size = 256;
    cfg.trace_path = "trace_check.jsonl";

    auto outcome = run_experiment(cfg);
    CHECK(outcome.exit_code == 0);

    // method=both suffixes the trace path per run
    for (const std::string method : {"tam", "two_phase"}) {
        std::ifstream in("trace_check." + method + ".jsonl");
        REQUIRE(in.good());
        int intra_seen = 0, inter_seen = 0;
        bool inter_started = false;
        for (std::string line; std::getline(in, line);) {
            auto msg = nlohmann::json::parse(line);
            CHECK(msg.contains("src"));
            CHECK(msg.contains("dst"));
            CHECK(msg.contains("bytes"));
            CHECK((msg["kind"] == "metadata" || msg["kind"] == "data"));
            if (msg["phase"] == "intra") {
                ++intra_seen;
                CHECK_FALSE(inter_started);  // phases in order
            } else {
                ++inter_seen;
                inter_started = true;
            }
        }
        if (method == "tam") CHECK(intra_seen > 0);
        if (method == "two_phase") CHECK(intra_seen == 0);
        CHECK(inter_seen > 0);
        std::remove(("trace_check." + method + ".jsonl").c_str());
    }
}

TEST_CASE("degenerate P_L = P reports differ only in labels") {
    RunConfig cfg;
    cfg.workload.kind = WorkloadKind::Contiguous1D;
    cfg.workload.block_bytes = 300;
    cfg.nodes = 2;
    cfg.procs_per_node = 3;
    cfg.aggs_per_node = 3;  // P_L = P
    cfg.p_g = 2;
    cfg.stripe_size = 128;

    auto outcome = run_experiment(cfg);
    REQUIRE(outcome.document["runs"].size() == 2);
    auto tam = outcome.document["runs"][0]["metrics"];
    auto two_phase = outcome.document["runs"][1]["metrics"];
    tam.erase("method");
    two_phase.erase("method");
    CHECK(tam == two_phase);
}
