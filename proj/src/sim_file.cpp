#include "tamio/sim_file.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "tamio/error.hpp"

namespace tamio {

namespace {

// Little-endian u64, independent of host byte order.
void put_u64(std::ofstream& out, std::uint64_t v) {
    std::uint8_t buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

}  // namespace

void SimFile::write(std::uint64_t offset, std::span<const std::uint8_t> bytes,
                    bool allow_overwrite) {
    if (bytes.empty()) return;
    if (offset >= kMaxFileOffset || bytes.size() > kMaxFileOffset - offset)
        throw config_error("SimFile::write: range exceeds file-offset bounds");
    if (!allow_overwrite && is_written_any(offset, bytes.size()))
        throw overlap_error("SimFile::write: overwrite of written byte", -1, 0, -1, 0);

    const std::uint64_t end = offset + bytes.size();

    // Chunks stay maximal, disjoint and non-abutting. The write extends a
    // covering-or-abutting left chunk in place (amortized growth), then
    // absorbs any following chunks it now reaches; each absorbed chunk is
    // copied once and erased, so the total cost stays linear in bytes.
    auto host = chunks_.end();
    auto after = chunks_.upper_bound(offset);
    if (after != chunks_.begin()) {
        auto prev = std::prev(after);
        if (prev->first + prev->second.size() >= offset) host = prev;
    }
    if (host == chunks_.end()) {
        host = chunks_.emplace(offset, std::vector<std::uint8_t>(bytes.begin(), bytes.end()))
                   .first;
    } else {
        std::vector<std::uint8_t>& data = host->second;
        if (end > host->first + data.size()) data.resize(end - host->first);
        std::memcpy(data.data() + (offset - host->first), bytes.data(), bytes.size());
    }

    auto next = std::next(host);
    while (next != chunks_.end() &&
           next->first <= host->first + host->second.size()) {
        const std::uint64_t host_end = host->first + host->second.size();
        const std::uint64_t next_end = next->first + next->second.size();
        if (next_end > host_end) {
            // keep the tail the new bytes did not cover
            const std::size_t tail = host_end - next->first;
            host->second.insert(host->second.end(), next->second.begin() + tail,
                                next->second.end());
        }
        next = chunks_.erase(next);
    }
}

bool SimFile::is_written_any(std::uint64_t offset, std::uint64_t length) const {
    if (length == 0) return false;
    auto it = chunks_.upper_bound(offset);
    if (it != chunks_.begin()) {
        auto prev = std::prev(it);
        if (prev->first + prev->second.size() > offset) return true;
    }
    return it != chunks_.end() && it->first < offset + length;
}

std::optional<std::uint8_t> SimFile::read_byte(std::uint64_t offset) const {
    auto it = chunks_.upper_bound(offset);
    if (it == chunks_.begin()) return std::nullopt;
    --it;
    if (offset < it->first + it->second.size()) return it->second[offset - it->first];
    return std::nullopt;
}

std::optional<std::vector<std::uint8_t>> SimFile::read(std::uint64_t offset,
                                                       std::uint64_t length) const {
    if (length == 0) return std::vector<std::uint8_t>{};
    if (!is_written(offset, length)) return std::nullopt;
    auto it = chunks_.upper_bound(offset);
    --it;  // is_written guarantees a covering chunk exists
    std::vector<std::uint8_t> out(it->second.begin() + (offset - it->first),
                                  it->second.begin() + (offset - it->first) + length);
    return out;
}

bool SimFile::is_written(std::uint64_t offset, std::uint64_t length) const {
    if (length == 0) return true;
    auto it = chunks_.upper_bound(offset);
    if (it == chunks_.begin()) return false;
    --it;
    return offset >= it->first && offset + length <= it->first + it->second.size();
}

std::vector<OffsetLength> SimFile::written_extents() const {
    std::vector<OffsetLength> out;
    out.reserve(chunks_.size());
    for (const auto& [off, data] : chunks_) out.push_back({off, data.size()});
    return out;
}

std::uint64_t SimFile::written_bytes() const {
    std::uint64_t total = 0;
    for (const auto& [off, data] : chunks_) total += data.size();
    return total;
}

void SimFile::dump(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw config_error("SimFile::dump: cannot open " + path);
    for (const auto& [off, data] : chunks_) {
        put_u64(out, off);
        put_u64(out, data.size());
        out.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size()));
    }
}

}  // namespace tamio
