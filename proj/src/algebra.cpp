#include "tamio/algebra.hpp"

#include <algorithm>
#include <compare>
#include <map>
#include <string>
#include <tuple>

#include "tamio/error.hpp"

namespace tamio {

namespace {

using Key = std::tuple<std::uint64_t, int, std::uint64_t>;

Key key_of(const Chunk& c) { return {c.offset, c.sender, c.seq}; }

bool sorted_by_key(const std::vector<Chunk>& list) {
    for (std::size_t i = 1; i < list.size(); ++i)
        if (key_of(list[i]) < key_of(list[i - 1])) return false;
    return true;
}

// First piece of `a` whose byte range reaches `offset`, for overlap reports.
const Piece& piece_covering(const Chunk& a, std::uint64_t offset) {
    for (const auto& p : a.pieces)
        if (p.end() > offset) return p;
    return a.pieces.back();
}

[[noreturn]] void throw_overlap(const Chunk& a, const Chunk& b) {
    const Piece& pa = piece_covering(a, b.offset);
    const Piece& pb = b.pieces.front();
    throw overlap_error("overlapping extents: rank " + std::to_string(pa.src.rank) + " extent " +
                            std::to_string(pa.src.seq) + " and rank " +
                            std::to_string(pb.src.rank) + " extent " + std::to_string(pb.src.seq),
                        pa.src.rank, pa.src.seq, pb.src.rank, pb.src.seq);
}

}  // namespace

std::vector<Chunk> chunks_of(const ProcRequest& proc) {
    std::vector<Chunk> out;
    out.reserve(proc.requests.extents.size());
    std::uint64_t pos = 0;
    for (std::size_t i = 0; i < proc.requests.extents.size(); ++i) {
        const auto& e = proc.requests.extents[i];
        Chunk c{e.offset, e.length, proc.rank, i, {}};
        c.pieces.push_back({e.offset, e.length, SourceRef{proc.rank, i, pos}, proc.rank});
        out.push_back(std::move(c));
        pos += e.length;
    }
    return out;
}

MergeResult heap_merge(const std::vector<std::vector<Chunk>>& lists) {
    MergeResult result;
    const int m = static_cast<int>(lists.size());

    std::size_t total = 0;
    for (int i = 0; i < m; ++i) {
        if (!sorted_by_key(lists[i]))
            throw config_error("heap_merge: input list " + std::to_string(i) + " is not sorted");
        total += lists[i].size();
    }
    result.chunks.reserve(total);

    if (m == 0) return result;
    if (m == 1) {
        result.chunks = lists[0];
        return result;
    }

    // Tournament (loser) tree over k leaves padded to a power of two.
    // Sentinel leaves lose every match without a key comparison, so the
    // counter sees exactly the merge's real work.
    int k = 1;
    while (k < m) k *= 2;
    constexpr int kSentinel = -1;

    std::vector<std::size_t> cursor(m, 0);
    auto leaf_key = [&](int leaf) { return key_of(lists[leaf][cursor[leaf]]); };
    auto exhausted = [&](int leaf) { return leaf >= m || cursor[leaf] >= lists[leaf].size(); };

    // true when a should win the match against b
    auto beats = [&](int a, int b) {
        if (a == kSentinel || exhausted(a)) return false;
        if (b == kSentinel || exhausted(b)) return true;
        ++result.comparisons;
        const auto order = leaf_key(a) <=> leaf_key(b);
        if (order != std::strong_ordering::equal) return order < 0;
        return a < b;  // full-key ties cannot arise between lists; keep list order
    };

    // Bottom-up build: losers stay in the tree, winners move up.
    std::vector<int> loser(k, kSentinel);
    std::vector<int> winner(2 * k, kSentinel);
    for (int i = 0; i < k; ++i) winner[k + i] = (i < m && !exhausted(i)) ? i : kSentinel;
    for (int v = k - 1; v >= 1; --v) {
        int a = winner[2 * v];
        int b = winner[2 * v + 1];
        if (beats(a, b)) {
            winner[v] = a;
            loser[v] = b;
        } else {
            winner[v] = b;
            loser[v] = a;
        }
    }
    int champion = winner[1];

    while (champion != kSentinel) {
        result.chunks.push_back(lists[champion][cursor[champion]]);
        ++cursor[champion];
        // Replay from the champion's leaf to the root.
        int cur = exhausted(champion) ? kSentinel : champion;
        int leaf = champion;
        for (int v = (k + leaf) / 2; v >= 1; v /= 2) {
            if (beats(loser[v], cur)) std::swap(loser[v], cur);
        }
        champion = cur;
    }
    return result;
}

std::vector<Chunk> flatten_overlaps(std::vector<Chunk> sorted, OverlapPolicy policy) {
    // Locate the first overlap; the common case has none.
    std::uint64_t max_end = 0;
    std::size_t max_holder = 0;
    bool overlap = false;
    std::size_t at = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0 && sorted[i].offset < max_end) {
            overlap = true;
            at = i;
            break;
        }
        if (i == 0 || sorted[i].end() > max_end) {
            max_end = sorted[i].end();
            max_holder = i;
        }
    }
    if (!overlap) return sorted;
    if (policy == OverlapPolicy::Strict) throw_overlap(sorted[max_holder], sorted[at]);

    // Last-writer resolution at piece granularity: apply pieces in ascending
    // (origin rank, seq) order into an interval map, later writers trimming
    // earlier ones.
    std::vector<Piece> pieces;
    for (const auto& c : sorted)
        pieces.insert(pieces.end(), c.pieces.begin(), c.pieces.end());
    std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
        return std::tie(a.src.rank, a.src.seq, a.src.pos) <
               std::tie(b.src.rank, b.src.seq, b.src.pos);
    });

    std::map<std::uint64_t, Piece> live;  // disjoint, keyed by offset
    auto trim_front = [](Piece p, std::uint64_t cut) {
        p.src.pos += cut - p.offset;
        p.length -= cut - p.offset;
        p.offset = cut;
        return p;
    };
    for (const auto& p : pieces) {
        const std::uint64_t s = p.offset;
        const std::uint64_t e = p.end();
        auto it = live.upper_bound(s);
        if (it != live.begin()) {
            auto prev = std::prev(it);
            if (prev->second.end() > s) it = prev;
        }
        while (it != live.end() && it->first < e) {
            Piece old = it->second;
            it = live.erase(it);
            if (old.offset < s) {
                Piece left = old;
                left.length = s - old.offset;
                live.emplace(left.offset, left);
            }
            if (old.end() > e) {
                Piece right = trim_front(old, e);
                it = live.emplace(right.offset, right).first;
                ++it;
            }
        }
        live.emplace(s, p);
    }

    // Regroup survivors: maximal runs of same-sender adjacent pieces.
    std::vector<Chunk> out;
    std::map<int, std::uint64_t> next_seq;
    for (const auto& [off, piece] : live) {
        if (!out.empty() && out.back().end() == off && out.back().sender == piece.sender) {
            out.back().length += piece.length;
            out.back().pieces.push_back(piece);
        } else {
            Chunk c{off, piece.length, piece.sender, next_seq[piece.sender]++, {piece}};
            out.push_back(std::move(c));
        }
    }
    return out;
}

CoalesceResult coalesce(const std::vector<Chunk>& sorted_disjoint,
                        std::optional<std::uint64_t> boundary) {
    CoalesceResult result;
    result.extents_in = sorted_disjoint.size();
    for (std::size_t i = 0; i < sorted_disjoint.size(); ++i) {
        const Chunk& c = sorted_disjoint[i];
        result.total_bytes += c.length;
        const bool adjacent = !result.extents.empty() && result.extents.back().end() == c.offset;
        if (!result.extents.empty() && c.offset < result.extents.back().end())
            throw_overlap(sorted_disjoint[i - 1], c);
        const bool crosses = boundary && c.offset % *boundary == 0;
        if (adjacent && !crosses) {
            auto& ext = result.extents.back();
            ext.length += c.length;
            ext.pieces.insert(ext.pieces.end(), c.pieces.begin(), c.pieces.end());
        } else {
            result.extents.push_back({c.offset, c.length, c.pieces});
        }
    }
    result.extents_out = result.extents.size();
    return result;
}

std::vector<std::vector<Chunk>> split_by_domain(const std::vector<CoalescedExtent>& extents,
                                                const StripeConfig& cfg, int pg, int sender) {
    if (pg < 1) throw config_error("split_by_domain: pg must be >= 1");
    std::vector<std::vector<Chunk>> out(pg);
    std::vector<std::uint64_t> next_seq(pg, 0);
    for (const auto& ext : extents) {
        std::uint64_t start = ext.offset;
        std::size_t piece_idx = 0;
        while (start < ext.end()) {
            const std::uint64_t stripe = stripe_of(start, cfg);
            const std::uint64_t cut = std::min(ext.end(), (stripe + 1) * cfg.stripe_size);
            const int target = static_cast<int>(stripe % static_cast<std::uint64_t>(pg));
            Chunk frag{start, cut - start, sender, next_seq[target]++, {}};
            // Trim pieces into [start, cut).
            while (piece_idx < ext.pieces.size() && ext.pieces[piece_idx].offset < cut) {
                Piece p = ext.pieces[piece_idx];
                if (p.offset < start) {
                    p.src.pos += start - p.offset;
                    p.length -= start - p.offset;
                    p.offset = start;
                }
                if (p.end() > cut) {
                    p.length = cut - p.offset;
                    frag.pieces.push_back(p);
                    break;  // rest of this piece belongs to the next fragment
                }
                frag.pieces.push_back(p);
                ++piece_idx;
            }
            out[target].push_back(std::move(frag));
            start = cut;
        }
    }
    return out;
}

}  // namespace tamio
