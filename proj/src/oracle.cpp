#include "tamio/oracle.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "tamio/error.hpp"

namespace tamio {

SimFile serial_oracle(const std::vector<ProcRequest>& procs, OverlapPolicy policy) {
    std::vector<const ProcRequest*> order;
    order.reserve(procs.size());
    for (const auto& proc : procs) {
        if (auto v = validate_proc(proc))
            throw config_error("serial_oracle: rank " + std::to_string(proc.rank) + ": " +
                               v->reason);
        order.push_back(&proc);
    }
    std::sort(order.begin(), order.end(),
              [](const ProcRequest* a, const ProcRequest* b) { return a->rank < b->rank; });

    SimFile file;
    // offset -> (end, writer rank, writer extent) for strict overlap reports
    std::map<std::uint64_t, std::tuple<std::uint64_t, int, std::uint64_t>> written;

    for (const ProcRequest* proc : order) {
        std::uint64_t pos = 0;
        for (std::size_t i = 0; i < proc->requests.extents.size(); ++i) {
            const auto& e = proc->requests.extents[i];
            if (policy == OverlapPolicy::Strict) {
                auto it = written.upper_bound(e.offset);
                if (it != written.begin() && std::get<0>(std::prev(it)->second) > e.offset)
                    --it;
                if (it != written.end() && it->first < e.end()) {
                    const auto& [end, rank, seq] = it->second;
                    throw overlap_error("serial_oracle: rank " + std::to_string(proc->rank) +
                                            " extent " + std::to_string(i) +
                                            " overlaps rank " + std::to_string(rank) +
                                            " extent " + std::to_string(seq),
                                        rank, seq, proc->rank, i);
                }
                written[e.offset] = {e.end(), proc->rank, i};
            }
            std::vector<std::uint8_t> bytes(e.length);
            for (std::uint64_t j = 0; j < e.length; ++j)
                bytes[j] = fill_byte(proc->fill_seed, pos + j);
            file.write(e.offset, bytes);
            pos += e.length;
        }
    }
    return file;
}

std::optional<Divergence> compare(const SimFile& a, const SimFile& b) {
    const auto ea = a.written_extents();
    const auto eb = b.written_extents();

    // Elementary segments between consecutive boundaries are uniformly
    // written or unwritten in each image.
    std::vector<std::uint64_t> bounds;
    for (const auto& e : ea) {
        bounds.push_back(e.offset);
        bounds.push_back(e.end());
    }
    for (const auto& e : eb) {
        bounds.push_back(e.offset);
        bounds.push_back(e.end());
    }
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        const std::uint64_t lo = bounds[i];
        const std::uint64_t len = bounds[i + 1] - lo;
        const bool in_a = a.is_written(lo, len);
        const bool in_b = b.is_written(lo, len);
        if (!in_a && !in_b) continue;
        if (in_a != in_b) {
            Divergence d{lo, std::nullopt, std::nullopt};
            if (in_a) d.byte_a = *a.read_byte(lo);
            if (in_b) d.byte_b = *b.read_byte(lo);
            return d;
        }
        const auto bytes_a = *a.read(lo, len);
        const auto bytes_b = *b.read(lo, len);
        for (std::uint64_t j = 0; j < len; ++j)
            if (bytes_a[j] != bytes_b[j]) return Divergence{lo + j, bytes_a[j], bytes_b[j]};
    }
    return std::nullopt;
}

}  // namespace tamio
