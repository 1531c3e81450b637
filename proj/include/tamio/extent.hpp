#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tamio {

// File offsets stay below this so offset+length arithmetic can never wrap,
// even after stripe rounding. 2^62 leaves headroom above any real file size.
inline constexpr std::uint64_t kMaxFileOffset = std::uint64_t{1} << 62;

// One contiguous file extent. The universal request unit.
struct OffsetLength {
    std::uint64_t offset = 0;
    std::uint64_t length = 0;

    std::uint64_t end() const { return offset + length; }

    friend bool operator==(const OffsetLength&, const OffsetLength&) = default;
};

// Offset-sorted sequence of extents plus the byte total.
struct RequestList {
    std::vector<OffsetLength> extents;
    std::uint64_t total_bytes = 0;

    static RequestList from_extents(std::vector<OffsetLength> extents);
};

// The write requests of one process. Data bytes are generated lazily from
// fill_seed (position-in-stream keyed), never stored.
struct ProcRequest {
    int rank = 0;
    RequestList requests;
    std::uint64_t fill_seed = 0;
};

// Deterministic data byte at stream position i of the stream keyed by seed.
inline std::uint8_t fill_byte(std::uint64_t seed, std::uint64_t i) {
    return static_cast<std::uint8_t>((seed * 167 + i * 13 + 5) & 0xff);
}

struct Violation {
    std::size_t index = 0;
    std::string reason;
};

// Confirms nondecreasing offsets, positive lengths, and offset-range bounds.
// Reports the first violating index; never throws.
std::optional<Violation> validate(const RequestList& list);

// As validate(), plus the ProcRequest invariants: rank in [0, P) when P >= 0,
// and no two extents of the same process overlapping.
std::optional<Violation> validate_proc(const ProcRequest& proc, int total_procs = -1);

}  // namespace tamio
