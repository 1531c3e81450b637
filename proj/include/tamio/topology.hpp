#pragma once

#include <cstdint>

#include "tamio/error.hpp"

namespace tamio {

// Compute-node grid with a uniform number of processes per node.
// Rank r lives on node r / procs_per_node.
struct Topology {
    int num_nodes = 1;
    int procs_per_node = 1;  // q

    Topology() = default;
    Topology(int num_nodes, int procs_per_node)
        : num_nodes(num_nodes), procs_per_node(procs_per_node) {
        if (num_nodes < 1 || procs_per_node < 1)
            throw config_error("topology: num_nodes and procs_per_node must be >= 1");
    }

    int total_procs() const { return num_nodes * procs_per_node; }

    friend bool operator==(const Topology&, const Topology&) = default;
};

inline int rank_to_node(int rank, const Topology& topo) {
    if (rank < 0 || rank >= topo.total_procs())
        throw config_error("rank_to_node: rank out of range");
    return rank / topo.procs_per_node;
}

// Stripe geometry of the simulated file. stripe_count doubles as the OST
// count; the default aggregator policy keeps P_G equal to it.
struct StripeConfig {
    std::uint64_t stripe_size = std::uint64_t{1} << 20;
    int stripe_count = 1;

    StripeConfig() = default;
    StripeConfig(std::uint64_t stripe_size, int stripe_count)
        : stripe_size(stripe_size), stripe_count(stripe_count) {
        if (stripe_size == 0) throw config_error("stripe_size must be > 0");
        if (stripe_count < 1) throw config_error("stripe_count must be >= 1");
    }

    friend bool operator==(const StripeConfig&, const StripeConfig&) = default;
};

inline std::uint64_t stripe_of(std::uint64_t offset, const StripeConfig& cfg) {
    return offset / cfg.stripe_size;
}

}  // namespace tamio
