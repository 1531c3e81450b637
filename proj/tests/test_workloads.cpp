#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <tuple>

#include "tamio/algebra.hpp"
#include "tamio/error.hpp"
#include "tamio/workloads.hpp"

using namespace tamio;

namespace {

constexpr const char* kFixture = TAMIO_DATA_DIR "/e3sm_like_decomp.json";

std::uint64_t total_extents(const std::vector<ProcRequest>& procs) {
    std::uint64_t n = 0;
    for (const auto& p : procs) n += p.requests.extents.size();
    return n;
}

std::uint64_t total_bytes(const std::vector<ProcRequest>& procs) {
    std::uint64_t n = 0;
    for (const auto& p : procs) n += p.requests.total_bytes;
    return n;
}

// Generators must produce per-process lists that validate and never overlap
// across processes.
void check_valid_and_disjoint(const std::vector<ProcRequest>& procs) {
    std::vector<std::vector<Chunk>> lists;
    for (const auto& p : procs) {
        REQUIRE_FALSE(validate_proc(p, int(procs.size())));
        lists.push_back(chunks_of(p));
    }
    auto merged = heap_merge(lists);
    CHECK_NOTHROW(flatten_overlaps(merged.chunks, OverlapPolicy::Strict));
}

}  // namespace

TEST_CASE("contiguous1d lays ranks back to back") {
    auto procs = gen_contiguous1d(4, 8);
    REQUIRE(procs.size() == 4);
    for (int r = 0; r < 4; ++r) {
        REQUIRE(procs[r].requests.extents.size() == 1);
        CHECK(procs[r].requests.extents[0] == OffsetLength{std::uint64_t(r) * 8, 8});
    }
    check_valid_and_disjoint(procs);

    auto one = gen_contiguous1d(1, 16);
    CHECK(one[0].requests.extents[0] == OffsetLength{0, 16});

    CHECK_THROWS_AS(gen_contiguous1d(0, 8), config_error);
    CHECK_THROWS_AS(gen_contiguous1d(4, 0), config_error);
}

TEST_CASE("contiguous1d coalesces to one extent per node group") {
    auto procs = gen_contiguous1d(4, 8);
    std::vector<std::vector<Chunk>> lists;
    for (const auto& p : procs) lists.push_back(chunks_of(p));
    auto co = coalesce(heap_merge(lists).chunks);
    REQUIRE(co.extents.size() == 1);
    CHECK(co.extents[0].length == 32);
}

TEST_CASE("btio request count follows the closed form") {
    auto procs = gen_btio(16, 4, 40);
    CHECK(total_extents(procs) == 20480);  // 40 * 16^2 * sqrt(4)
    CHECK(total_extents(procs) == btio_total_extents(16, 4, 40));
    CHECK(total_bytes(procs) == btio_total_bytes(16, 40));
    check_valid_and_disjoint(procs);

    for (auto [n, p, vars] : {std::tuple{16, 16, 4}, {32, 4, 3}, {8, 64, 2}}) {
        auto ps = gen_btio(n, p, vars);
        CHECK(total_extents(ps) == btio_total_extents(n, p, vars));
        CHECK(total_bytes(ps) == btio_total_bytes(n, vars));
    }
}

TEST_CASE("btio full-scale totals evaluate symbolically") {
    // 8 * 40 * 512^3 * 5 bytes is exactly 200 GiB.
    CHECK(btio_total_bytes(512, 40) == std::uint64_t{200} << 30);
    CHECK(btio_total_extents(512, 16384, 40) == std::uint64_t{512} * 512 * 40 * 128);
}

TEST_CASE("btio cells cover distinct z-slabs per process") {
    const std::uint64_t n = 16;
    const int p = 16, s = 4;
    auto procs = gen_btio(n, p, 1);
    const std::uint64_t b = n / s;
    const std::uint64_t cell = 40;
    for (const auto& proc : procs) {
        std::set<std::uint64_t> slabs;
        for (const auto& e : proc.requests.extents) slabs.insert(e.offset / (cell * n * n * b));
        CHECK(slabs.size() == std::size_t(s));  // one cell per z-slab
    }
    check_valid_and_disjoint(procs);
}

TEST_CASE("btio rejects invalid shapes") {
    CHECK_THROWS_AS(gen_btio(16, 5, 40), config_error);   // not a square
    CHECK_THROWS_AS(gen_btio(10, 16, 40), config_error);  // 4 does not divide 10
    CHECK_THROWS_AS(gen_btio(16, 4, 0), config_error);
}

TEST_CASE("s3d run counts and totals") {
    // pressure is one slab: (n/py) * (n/pz) runs per process
    auto procs = gen_s3d(8, 2, 2, 2);
    REQUIRE(procs.size() == 8);
    CHECK(total_bytes(procs) == s3d_total_bytes(8));
    check_valid_and_disjoint(procs);

    for (const auto& proc : procs)
        CHECK(proc.requests.extents.size() == 16 * 4 * 4);  // all 16 slabs

    // count the pressure runs alone: variable base 14 * n^3 * 8
    const std::uint64_t lo = std::uint64_t{14} * 8 * 8 * 8 * 8;
    const std::uint64_t hi = std::uint64_t{15} * 8 * 8 * 8 * 8;
    std::uint64_t pressure_runs = 0;
    for (const auto& e : procs[0].requests.extents)
        if (e.offset >= lo && e.offset < hi) ++pressure_runs;
    CHECK(pressure_runs == 16);
}

TEST_CASE("s3d full-scale totals evaluate symbolically") {
    CHECK(s3d_total_bytes(800) == std::uint64_t{65'536'000'000});
    CHECK((s3d_total_bytes(800) >> 30) == 61);  // the 61 GiB figure
}

TEST_CASE("s3d single process coalesces to one run") {
    auto procs = gen_s3d(8, 1, 1, 1);
    REQUIRE(procs.size() == 1);
    CHECK(procs[0].requests.extents.size() == 16 * 8 * 8);
    auto co = coalesce(heap_merge({chunks_of(procs[0])}).chunks);
    // Variables sit back to back, so the whole checkpoint is one extent.
    CHECK(co.extents.size() == 1);
    CHECK(co.extents[0].length == s3d_total_bytes(8));
}

TEST_CASE("s3d rejects bad factorizations") {
    CHECK_THROWS_AS(gen_s3d(8, 3, 1, 1), config_error);  // 3 does not divide 8
    CHECK_THROWS_AS(gen_s3d(8, 0, 2, 2), config_error);

    WorkloadSpec spec;
    spec.kind = WorkloadKind::S3D;
    spec.n = 8;
    spec.px = 2;
    spec.py = 2;
    spec.pz = 2;
    CHECK_THROWS_AS(generate(spec, 12), config_error);  // px*py*pz != P
}

TEST_CASE("s3d auto-factorization is cubic when possible") {
    WorkloadSpec spec;
    spec.kind = WorkloadKind::S3D;
    spec.n = 8;
    auto procs = generate(spec, 8);  // 2*2*2
    CHECK(procs.size() == 8);
    CHECK(procs[0].requests.extents.size() == 16 * 4 * 4);
}

TEST_CASE("decomposition fixture partitions round-robin by process") {
    auto recorded = load_decomp(kFixture, 10);  // identity assignment
    auto merged = load_decomp(kFixture, 4);

    CHECK(total_extents(recorded) == 130);
    CHECK(total_extents(merged) == total_extents(recorded));
    CHECK(total_bytes(merged) == total_bytes(recorded));
    check_valid_and_disjoint(merged);
    check_valid_and_disjoint(recorded);

    // target 0 under P=4 holds recorded procs {0, 4, 8}
    std::uint64_t expect = recorded[0].requests.extents.size() +
                           recorded[4].requests.extents.size() +
                           recorded[8].requests.extents.size();
    CHECK(merged[0].requests.extents.size() == expect);

    std::multiset<std::uint64_t> offsets_expect, offsets_got;
    for (int r : {0, 4, 8})
        for (const auto& e : recorded[r].requests.extents) offsets_expect.insert(e.offset);
    for (const auto& e : merged[0].requests.extents) offsets_got.insert(e.offset);
    CHECK(offsets_expect == offsets_got);
}

TEST_CASE("decomposition loader error paths") {
    CHECK_THROWS_AS(load_decomp("no-such-file.json", 2), config_error);
    CHECK_THROWS_AS(load_decomp(kFixture, 11), config_error);  // more targets than recorded

    const std::string bad = "bad_decomp.json";
    {
        std::ofstream out(bad);
        out << "{\"element_size\": 8, \"procs\": [{\"rank\": 0, \"offsets\": [0, 4], "
               "\"lengths\": [2]}]}";
    }
    CHECK_THROWS_AS(load_decomp(bad, 1), config_error);
    std::remove(bad.c_str());

    const std::string garbled = "garbled_decomp.json";
    {
        std::ofstream out(garbled);
        out << "{not json";
    }
    CHECK_THROWS_AS(load_decomp(garbled, 1), config_error);
    std::remove(garbled.c_str());
}
