#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "godm/error.hpp"

namespace godm {

inline constexpr int kInlier = 0;
inline constexpr int kOutlier = 1;
inline constexpr int kUnknown = -1;

enum class Split : std::uint8_t { None, Train, Val, Test };

struct Edge {
    std::size_t src = 0;
    std::size_t dst = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Attributed graph with tri-state node labels, optional typed and
/// timestamped directed edges, and a train/val/test split over labeled nodes.
struct Graph {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> features;  // n×d, row-major
    std::vector<int> labels;       // kInlier, kOutlier or kUnknown
    std::vector<Split> split;      // per node
    std::vector<Edge> edges;
    std::vector<std::int64_t> edge_time;  // empty or one per edge, >= 0
    std::vector<int> edge_type;           // empty or one per edge, in 1..P
    int num_types = 0;                    // P; 0 for untyped graphs
    bool timed = false;                   // edge_time is populated

    std::size_t num_edges() const noexcept { return edges.size(); }
    bool has_time() const noexcept { return timed; }
    bool has_types() const noexcept { return num_types > 0; }

    const double* row(std::size_t i) const { return features.data() + i * d; }

    std::vector<bool> mask(Split s) const {
        std::vector<bool> m(n, false);
        for (std::size_t i = 0; i < n; ++i) m[i] = split[i] == s;
        return m;
    }
    std::size_t count(Split s, int label) const {
        std::size_t c = 0;
        for (std::size_t i = 0; i < n; ++i) c += (split[i] == s && labels[i] == label);
        return c;
    }

    /// Throws Error describing the first violated invariant.
    void validate() const {
        if (features.size() != n * d) throw Error("graph: feature buffer is not n×d");
        if (labels.size() != n || split.size() != n) throw Error("graph: label/split vectors must have n entries");
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] != kInlier && labels[i] != kOutlier && labels[i] != kUnknown)
                throw Error("graph: node " + std::to_string(i) + " has invalid label");
            if (split[i] != Split::None && labels[i] == kUnknown)
                throw Error("graph: node " + std::to_string(i) + " is masked but has unknown label");
        }
        for (std::size_t e = 0; e < edges.size(); ++e)
            if (edges[e].src >= n || edges[e].dst >= n)
                throw Error("graph: edge " + std::to_string(e) + " references a node outside 0.." +
                            std::to_string(n == 0 ? 0 : n - 1));
        if (timed ? edge_time.size() != edges.size() : !edge_time.empty())
            throw Error("graph: edge_time length differs from edge count");
        for (auto t : edge_time)
            if (t < 0) throw Error("graph: negative edge timestamp");
        if (num_types < 0) throw Error("graph: negative edge-type count");
        if (num_types == 0 && !edge_type.empty()) throw Error("graph: typed edges on a graph with P = 0");
        if (num_types > 0 && edge_type.size() != edges.size())
            throw Error("graph: edge_type length differs from edge count");
        for (auto p : edge_type)
            if (p < 1 || p > num_types) throw Error("graph: edge type outside 1..P");
    }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.n == b.n && a.d == b.d && a.features == b.features && a.labels == b.labels &&
               a.split == b.split && a.edges == b.edges && a.edge_time == b.edge_time &&
               a.edge_type == b.edge_type && a.num_types == b.num_types && a.timed == b.timed;
    }
};

/// Labels as they enter the model equations: unknown counts as 0.
inline double numeric_label(int label) { return label == kOutlier ? 1.0 : 0.0; }

}  // namespace godm
