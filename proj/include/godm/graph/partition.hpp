#pragma once

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <vector>

#include "godm/graph/graph.hpp"

namespace godm {

/// Node-disjoint cover of a graph, used as training minibatches.
struct Partitioning {
    std::vector<std::size_t> assignment;  // node -> partition id
    std::size_t target_size = 0;
    std::vector<std::vector<std::size_t>> members;  // ascending node ids per partition

    std::size_t size() const noexcept { return members.size(); }
};

/// Deterministic BFS growth: seed at the lowest-index unassigned node and add
/// nodes breadth-first (both edge directions, ascending neighbor order) until
/// the partition holds `target` nodes. When the frontier runs dry the
/// partition reseeds at the next unassigned node, so every partition except
/// the last has exactly `target` nodes.
inline Partitioning partition_graph(const Graph& g, std::size_t target) {
    if (target < 2) throw ConfigError("partition_graph: target size must be >= 2");
    std::vector<std::vector<std::size_t>> adj(g.n);
    for (const auto& e : g.edges) {
        if (e.src == e.dst) continue;
        adj[e.src].push_back(e.dst);
        adj[e.dst].push_back(e.src);
    }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }

    constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
    Partitioning p;
    p.target_size = target;
    p.assignment.assign(g.n, kUnassigned);
    std::size_t next_seed = 0, placed = 0;
    while (placed < g.n) {
        const std::size_t id = p.members.size();
        std::vector<std::size_t> part;
        std::deque<std::size_t> frontier;
        auto take = [&](std::size_t v) {
            p.assignment[v] = id;
            part.push_back(v);
            frontier.push_back(v);
            ++placed;
        };
        while (part.size() < target && placed < g.n) {
            if (frontier.empty()) {
                while (p.assignment[next_seed] != kUnassigned) ++next_seed;
                take(next_seed);
                continue;
            }
            const std::size_t u = frontier.front();
            frontier.pop_front();
            for (std::size_t v : adj[u]) {
                if (part.size() >= target) break;
                if (p.assignment[v] == kUnassigned) take(v);
            }
        }
        std::sort(part.begin(), part.end());
        p.members.push_back(std::move(part));
    }
    return p;
}

/// Fraction of edges whose endpoints fall in different partitions.
inline double edge_cut_fraction(const Graph& g, const Partitioning& p) {
    if (g.edges.empty()) return 0.0;
    std::size_t cut = 0;
    for (const auto& e : g.edges) cut += p.assignment[e.src] != p.assignment[e.dst];
    return static_cast<double>(cut) / static_cast<double>(g.edges.size());
}

/// A partition's induced subgraph in local indices.
struct Subgraph {
    std::vector<std::size_t> nodes;  // global ids, local index = position
    std::size_t d = 0;
    std::vector<double> features;    // m×d
    std::vector<double> y;           // numeric labels as seen by the model
    std::vector<std::size_t> src, dst;
    std::vector<std::int64_t> time;
    std::vector<int> type;
    int num_types = 0;
    bool timed = false;

    std::size_t size() const noexcept { return nodes.size(); }
    std::size_t num_edges() const noexcept { return src.size(); }
};

/// Induced subgraph on `nodes` keeping edges with both ends inside, in the
/// graph's edge order. `y` is indexed by global node id.
inline Subgraph extract_subgraph(const Graph& g, const std::vector<std::size_t>& nodes, const std::vector<double>& y) {
    Subgraph s;
    s.nodes = nodes;
    s.d = g.d;
    s.num_types = g.num_types;
    s.timed = g.timed;
    std::unordered_map<std::size_t, std::size_t> local;
    local.reserve(nodes.size() * 2);
    for (std::size_t k = 0; k < nodes.size(); ++k) local.emplace(nodes[k], k);
    s.features.reserve(nodes.size() * g.d);
    for (auto v : nodes) {
        s.features.insert(s.features.end(), g.row(v), g.row(v) + g.d);
        s.y.push_back(y[v]);
    }
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        auto a = local.find(g.edges[e].src);
        if (a == local.end()) continue;
        auto b = local.find(g.edges[e].dst);
        if (b == local.end()) continue;
        s.src.push_back(a->second);
        s.dst.push_back(b->second);
        if (g.timed) s.time.push_back(g.edge_time[e]);
        if (g.has_types()) s.type.push_back(g.edge_type[e]);
    }
    return s;
}

/// Whole graph as a single subgraph.
inline Subgraph whole_graph(const Graph& g, const std::vector<double>& y) {
    std::vector<std::size_t> all(g.n);
    for (std::size_t i = 0; i < g.n; ++i) all[i] = i;
    return extract_subgraph(g, all, y);
}

}  // namespace godm
