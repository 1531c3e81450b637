#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tamio/algebra.hpp"
#include "tamio/extent.hpp"
#include "tamio/sim_file.hpp"

namespace tamio {

// Ground-truth writer: applies every process's extents directly, in
// ascending rank order, filling data from the same stream-position-keyed
// byte function the pipeline uses. Under the strict policy any cross-rank
// overlap raises overlap_error naming both writers; under last-writer the
// higher rank simply lands later.
SimFile serial_oracle(const std::vector<ProcRequest>& procs,
                      OverlapPolicy policy = OverlapPolicy::Strict);

struct Divergence {
    std::uint64_t offset = 0;
    std::optional<std::uint8_t> byte_a;  // nullopt: unwritten in that image
    std::optional<std::uint8_t> byte_b;
};

// Byte-exact comparison over the union of written extents, including
// written-vs-unwritten mismatches. Returns the first divergence, if any.
std::optional<Divergence> compare(const SimFile& a, const SimFile& b);

}  // namespace tamio
