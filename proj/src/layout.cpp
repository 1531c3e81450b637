#include "tamio/layout.hpp"

#include <algorithm>
#include <set>

namespace tamio {

std::vector<int> select_local_aggregators(int q, int c) {
    if (c < 1 || c > q) throw config_error("select_local_aggregators: need 1 <= c <= q");
    const int e = q % c;
    const int up = (q + c - 1) / c;  // ceil(q/c)
    const int down = q / c;
    std::vector<int> out;
    out.reserve(c);
    for (int i = 0; i < c; ++i) {
        if (i < e)
            out.push_back(up * i);
        else
            out.push_back(up * e + down * (i - e));
    }
    return out;
}

std::vector<int> assign_groups(const Topology& topo, const std::vector<int>& local_aggs) {
    const int p = topo.total_procs();
    std::vector<int> group_of(p, -1);
    for (int agg : local_aggs) {
        if (agg < 0 || agg >= p) throw config_error("assign_groups: aggregator rank out of range");
        group_of[agg] = agg;
    }
    int current = -1;
    for (int r = 0; r < p; ++r) {
        if (r % topo.procs_per_node == 0) {
            // Each node's range must open with an aggregator.
            if (group_of[r] != r)
                throw config_error("assign_groups: node-local rank 0 is not an aggregator");
            current = r;
        } else if (group_of[r] == r) {
            current = r;
        }
        group_of[r] = current;
    }
    return group_of;
}

namespace {

// Per-node candidate lists: the node's local aggregators rotated by `pick`,
// extended with promotable ranks in spread order once existing ones run out.
std::vector<std::vector<int>> node_candidates(const Topology& topo,
                                              const std::vector<int>& local_aggs, int pick,
                                              int needed_per_node) {
    const int q = topo.procs_per_node;
    std::vector<std::vector<int>> per_node(topo.num_nodes);
    for (int agg : local_aggs) per_node[agg / q].push_back(agg);
    for (auto& list : per_node) std::sort(list.begin(), list.end());

    for (int node = 0; node < topo.num_nodes; ++node) {
        auto& list = per_node[node];
        if (static_cast<int>(list.size()) < needed_per_node) {
            // Not enough existing aggregators: extend with the spread pattern
            // for the larger count, skipping ranks already present.
            std::set<int> have(list.begin(), list.end());
            for (int local : select_local_aggregators(q, std::min(q, needed_per_node))) {
                int rank = node * q + local;
                if (have.insert(rank).second) list.push_back(rank);
            }
        }
        if (pick > 0 && !list.empty())
            std::rotate(list.begin(), list.begin() + pick % list.size(), list.end());
    }
    return per_node;
}

}  // namespace

GlobalSelection select_global_aggregators(const Topology& topo, int pg, GlobalPolicy policy,
                                          const std::vector<int>& local_aggs, int pick) {
    const int p = topo.total_procs();
    if (pg < 1) throw config_error("select_global_aggregators: P_G must be >= 1");
    if (pg > p) throw config_error("select_global_aggregators: P_G exceeds process count");

    GlobalSelection sel;
    std::set<int> local(local_aggs.begin(), local_aggs.end());

    if (policy == GlobalPolicy::RoundRobinAcrossNodes) {
        // 0, q, 2q, ..., then 1, q+1, ... until pg chosen.
        const int q = topo.procs_per_node;
        for (int j = 0; static_cast<int>(sel.global_aggs.size()) < pg; ++j) {
            for (int node = 0; node < topo.num_nodes; ++node) {
                if (static_cast<int>(sel.global_aggs.size()) == pg) break;
                sel.global_aggs.push_back(node * q + j);
            }
        }
    } else {
        const int nodes_used = std::min(pg, topo.num_nodes);
        const std::vector<int> node_ids = select_local_aggregators(topo.num_nodes, nodes_used);
        const int needed_per_node = (pg + nodes_used - 1) / nodes_used;
        auto candidates = node_candidates(topo, local_aggs, pick, needed_per_node);
        for (int round = 0; static_cast<int>(sel.global_aggs.size()) < pg; ++round) {
            for (int node : node_ids) {
                if (static_cast<int>(sel.global_aggs.size()) == pg) break;
                if (round < static_cast<int>(candidates[node].size()))
                    sel.global_aggs.push_back(candidates[node][round]);
            }
        }
    }

    for (int rank : sel.global_aggs)
        if (!local.count(rank)) sel.promoted.push_back(rank);
    return sel;
}

bool AggregatorLayout::is_local_agg(int rank) const {
    return std::binary_search(local_aggs.begin(), local_aggs.end(), rank);
}

int AggregatorLayout::global_index(int rank) const {
    auto it = std::find(global_aggs.begin(), global_aggs.end(), rank);
    return it == global_aggs.end() ? -1 : static_cast<int>(it - global_aggs.begin());
}

AggregatorLayout build_layout(const Topology& topo, int aggs_per_node, int pg,
                              GlobalPolicy policy, int pick) {
    AggregatorLayout layout;
    layout.aggs_per_node = aggs_per_node;

    const std::vector<int> node_local = select_local_aggregators(topo.procs_per_node, aggs_per_node);
    for (int node = 0; node < topo.num_nodes; ++node)
        for (int local : node_local) layout.local_aggs.push_back(node * topo.procs_per_node + local);

    GlobalSelection sel = select_global_aggregators(topo, pg, policy, layout.local_aggs, pick);
    layout.global_aggs = std::move(sel.global_aggs);
    if (!sel.promoted.empty()) {
        layout.local_aggs.insert(layout.local_aggs.end(), sel.promoted.begin(),
                                 sel.promoted.end());
        std::sort(layout.local_aggs.begin(), layout.local_aggs.end());
        layout.local_aggs.erase(std::unique(layout.local_aggs.begin(), layout.local_aggs.end()),
                                layout.local_aggs.end());
    }
    layout.group_of = assign_groups(topo, layout.local_aggs);
    check_layout(topo, layout);
    return layout;
}

void check_layout(const Topology& topo, const AggregatorLayout& layout) {
    const int p = topo.total_procs();
    if (layout.local_aggs.empty()) throw config_error("layout: no local aggregators");
    if (!std::is_sorted(layout.local_aggs.begin(), layout.local_aggs.end()))
        throw config_error("layout: local aggregators not sorted");

    std::vector<int> per_node(topo.num_nodes, 0);
    for (int agg : layout.local_aggs) {
        if (agg < 0 || agg >= p) throw config_error("layout: local aggregator out of range");
        ++per_node[agg / topo.procs_per_node];
    }
    for (int count : per_node)
        if (count < layout.aggs_per_node)
            throw config_error("layout: node hosts fewer than c local aggregators");

    for (int rank : layout.global_aggs)
        if (!layout.is_local_agg(rank))
            throw config_error("layout: global aggregator is not a local aggregator");

    if (static_cast<int>(layout.group_of.size()) != p)
        throw config_error("layout: group_of size mismatch");
    for (int r = 0; r < p; ++r) {
        const int g = layout.group_of[r];
        if (!layout.is_local_agg(g) || g > r || g / topo.procs_per_node != r / topo.procs_per_node)
            throw config_error("layout: group assignment violates the range rule");
    }
}

}  // namespace tamio
