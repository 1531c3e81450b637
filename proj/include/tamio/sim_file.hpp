#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tamio/extent.hpp"

namespace tamio {

// Sparse in-memory byte store standing in for the striped file. Holds only
// the written regions, so Table-I-scale offsets fit at reduced density.
// Reading an unwritten byte is a detectable condition, never a silent zero.
// Single-writer use only.
class SimFile {
public:
    // Writes bytes at offset. allow_overwrite=false raises overlap_error if
    // any target byte was written before (origins unknown at this level, so
    // the error carries ranks -1; callers with provenance detect earlier).
    void write(std::uint64_t offset, std::span<const std::uint8_t> bytes,
               bool allow_overwrite = true);

    // Byte at offset, or nullopt if that byte was never written.
    std::optional<std::uint8_t> read_byte(std::uint64_t offset) const;

    // Contiguous read; nullopt if any byte in the range is unwritten.
    std::optional<std::vector<std::uint8_t>> read(std::uint64_t offset,
                                                  std::uint64_t length) const;

    // True if every byte of the range is written.
    bool is_written(std::uint64_t offset, std::uint64_t length) const;

    // True if any byte of the range is written. The overlap query.
    bool is_written_any(std::uint64_t offset, std::uint64_t length) const;

    // Written regions, coalesced and sorted by offset.
    std::vector<OffsetLength> written_extents() const;

    std::uint64_t written_bytes() const;

    // Binary sidecar for external diffing: little-endian u64 offset, u64
    // length, then the raw bytes, one triplet per written extent.
    void dump(const std::string& path) const;

    friend bool operator==(const SimFile& a, const SimFile& b) { return a.chunks_ == b.chunks_; }

private:
    // Disjoint, non-adjacent chunks keyed by start offset.
    std::map<std::uint64_t, std::vector<std::uint8_t>> chunks_;
};

}  // namespace tamio
