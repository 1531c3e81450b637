#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tamio/extent.hpp"
#include "tamio/topology.hpp"

namespace tamio {

// Identifies one extent of one origin process and where its bytes start in
// that process's generated data stream.
struct SourceRef {
    int rank = 0;        // origin process
    std::uint64_t seq = 0;   // extent index within the origin's request list
    std::uint64_t pos = 0;   // byte position within the origin's data stream

    friend bool operator==(const SourceRef&, const SourceRef&) = default;
};

// A contiguous run of one origin's bytes placed at a file offset. `sender`
// is the process that currently holds the bytes (the origin itself during
// intra-node aggregation, the local aggregator afterwards).
struct Piece {
    std::uint64_t offset = 0;
    std::uint64_t length = 0;
    SourceRef src;
    int sender = 0;

    std::uint64_t end() const { return offset + length; }

    friend bool operator==(const Piece&, const Piece&) = default;
};

// The unit that flows through merge and coalesce: one contiguous file extent
// with the pieces composing it. (sender, seq) is the merge tie-break
// identity; a sender's chunks carry strictly increasing seq.
struct Chunk {
    std::uint64_t offset = 0;
    std::uint64_t length = 0;
    int sender = 0;
    std::uint64_t seq = 0;
    std::vector<Piece> pieces;

    std::uint64_t end() const { return offset + length; }

    friend bool operator==(const Chunk&, const Chunk&) = default;
};

// Wraps one process's request list as single-piece chunks (sender = origin).
std::vector<Chunk> chunks_of(const ProcRequest& proc);

struct MergeResult {
    std::vector<Chunk> chunks;
    std::uint64_t comparisons = 0;  // key-vs-key orderings performed
};

// K-way merge of individually sorted chunk lists via a tournament (loser)
// tree: at most n*ceil(log2 m) + m key comparisons for n total chunks over
// m lists, counted exactly. Output is sorted by (offset, sender, seq) and
// stable with respect to that key. Throws config_error naming the offending
// list if an input list is not sorted.
MergeResult heap_merge(const std::vector<std::vector<Chunk>>& lists);

enum class OverlapPolicy { Strict, LastWriter };

// Resolves overlapping chunks in a sorted list. Disjoint input comes back
// untouched. Strict raises overlap_error identifying both origins.
// LastWriter keeps, for every contested byte, the piece of the highest
// (origin rank, seq); surviving pieces are regrouped into chunks of maximal
// same-sender adjacent runs with per-sender seq renumbered.
std::vector<Chunk> flatten_overlaps(std::vector<Chunk> sorted, OverlapPolicy policy);

// One output extent of coalescing: a maximal contiguous run with the ordered
// pieces composing it. Pieces tile [offset, offset+length) exactly.
struct CoalescedExtent {
    std::uint64_t offset = 0;
    std::uint64_t length = 0;
    std::vector<Piece> pieces;

    std::uint64_t end() const { return offset + length; }
};

struct CoalesceResult {
    std::vector<CoalescedExtent> extents;
    std::uint64_t extents_in = 0;
    std::uint64_t extents_out = 0;
    std::uint64_t total_bytes = 0;
};

// Merges exactly adjacent chunks (end of one == start of the next), never
// bridging gaps. `boundary`, when set, stops runs from crossing multiples of
// that many bytes (used to keep global-aggregator extents within stripes).
// Input must be sorted and disjoint; overlap raises overlap_error.
CoalesceResult coalesce(const std::vector<Chunk>& sorted_disjoint,
                        std::optional<std::uint64_t> boundary = std::nullopt);

// Cuts every extent at stripe boundaries and routes each fragment to global
// aggregator index stripe_of(fragment) mod pg. Fragments become chunks
// stamped with `sender`, seq running per destination; pieces are trimmed to
// the fragment. The fragments reproduce the input bytes exactly.
std::vector<std::vector<Chunk>> split_by_domain(const std::vector<CoalescedExtent>& extents,
                                                const StripeConfig& cfg, int pg, int sender);

}  // namespace tamio
