#include "tamio/extent.hpp"

namespace tamio {

RequestList RequestList::from_extents(std::vector<OffsetLength> extents) {
    RequestList list;
    list.extents = std::move(extents);
    for (const auto& e : list.extents) list.total_bytes += e.length;
    return list;
}

std::optional<Violation> validate(const RequestList& list) {
    std::uint64_t prev_offset = 0;
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < list.extents.size(); ++i) {
        const auto& e = list.extents[i];
        if (e.length == 0) return Violation{i, "zero-length extent"};
        if (e.offset >= kMaxFileOffset || e.length > kMaxFileOffset - e.offset)
            return Violation{i, "extent exceeds file-offset range"};
        if (i > 0 && e.offset < prev_offset)
            return Violation{i, "offsets not monotonically nondecreasing"};
        prev_offset = e.offset;
        sum += e.length;
    }
    if (sum != list.total_bytes) return Violation{list.extents.size(), "total_bytes mismatch"};
    return std::nullopt;
}

std::optional<Violation> validate_proc(const ProcRequest& proc, int total_procs) {
    if (proc.rank < 0 || (total_procs >= 0 && proc.rank >= total_procs))
        return Violation{0, "rank out of range"};
    if (auto v = validate(proc.requests)) return v;
    std::uint64_t prev_end = 0;
    for (std::size_t i = 0; i < proc.requests.extents.size(); ++i) {
        const auto& e = proc.requests.extents[i];
        if (i > 0 && e.offset < prev_end)
            return Violation{i, "extents of one process overlap"};
        prev_end = e.end();
    }
    return std::nullopt;
}

}  // namespace tamio
