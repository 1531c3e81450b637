#pragma once

#include <vector>

#include "tamio/topology.hpp"

namespace tamio {

// Placement policy for global aggregators.
//   SpreadEven          — spread the selected nodes (and the aggregators on
//                         them) evenly across the machine.
//   RoundRobinAcrossNodes — rank 0 of every node first, then rank 1, ...
//                         (the Cray MPI ordering).
enum class GlobalPolicy { SpreadEven, RoundRobinAcrossNodes };

// Node-local ranks of the c local aggregators on a node running q processes.
// With e = q mod c, aggregator i sits at ceil(q/c)*i for i < e and at
// ceil(q/c)*e + floor(q/c)*(i-e) for i >= e. Always starts at rank 0, always
// strictly increasing, always exactly c entries.
std::vector<int> select_local_aggregators(int q, int c);

// Maps every global rank to the greatest local-aggregator rank on its node
// that is <= its own rank. local_aggs holds sorted global ranks and must
// include node-local rank 0 of every node.
std::vector<int> assign_groups(const Topology& topo, const std::vector<int>& local_aggs);

struct GlobalSelection {
    std::vector<int> global_aggs;  // order defines the OST mapping
    std::vector<int> promoted;     // ranks newly added to the local-aggregator set
};

// Chooses pg global-aggregator ranks by policy. Every chosen rank must be a
// local aggregator; ranks the policy demands that are not yet local come
// back in `promoted` and join the local set. `pick` rotates which of a
// node's local aggregators serves as its global aggregator (default: the
// lowest).
GlobalSelection select_global_aggregators(const Topology& topo, int pg, GlobalPolicy policy,
                                          const std::vector<int>& local_aggs, int pick = 0);

// Selected local and global aggregator ranks plus the group assignment.
struct AggregatorLayout {
    std::vector<int> local_aggs;   // sorted global ranks, size P_L
    std::vector<int> global_aggs;  // ordered; index g owns stripes == g (mod P_G)
    std::vector<int> group_of;     // rank -> its local aggregator rank
    int aggs_per_node = 0;         // c before any policy-driven promotion

    int num_local() const { return static_cast<int>(local_aggs.size()); }
    int num_global() const { return static_cast<int>(global_aggs.size()); }
    bool is_local_agg(int rank) const;
    // Position of rank in global_aggs, or -1.
    int global_index(int rank) const;
};

// Builds the full layout: per-node local aggregators from the selection
// formula, group assignment, then global aggregators by policy (re-grouping
// if the policy promoted extra locals).
AggregatorLayout build_layout(const Topology& topo, int aggs_per_node, int pg,
                              GlobalPolicy policy, int pick = 0);

// Verifies the layout invariants against the topology; throws config_error.
void check_layout(const Topology& topo, const AggregatorLayout& layout);

}  // namespace tamio
