#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tamio {

// Invalid configuration or contract violation at an API boundary.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Two extents from different origins cover a common byte under the strict
// overlap policy. Carries enough context to identify both writers.
class overlap_error : public std::runtime_error {
public:
    overlap_error(const std::string& what, int rank_a, std::uint64_t seq_a, int rank_b,
                  std::uint64_t seq_b)
        : std::runtime_error(what), rank_a(rank_a), seq_a(seq_a), rank_b(rank_b), seq_b(seq_b) {}

    int rank_a;
    std::uint64_t seq_a;
    int rank_b;
    std::uint64_t seq_b;
};

}  // namespace tamio
