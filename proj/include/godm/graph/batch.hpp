#pragma once

#include "godm/graph/graph.hpp"

namespace godm {

/// Disjoint union of a real graph and a synthetic one. Synthetic nodes are
/// appended after the real ones, labeled outlier and placed in the train split.
inline Graph batch_graphs(const Graph& real, const Graph& synthetic) {
    if (synthetic.n == 0) return real;
    if (synthetic.d != real.d)
        throw ShapeError("batch_graphs: feature dimension " + std::to_string(synthetic.d) + " != " +
                         std::to_string(real.d));
    if (synthetic.num_types != real.num_types || synthetic.timed != real.timed)
        throw ShapeError("batch_graphs: synthetic edge channels do not match the real graph");
    Graph out = real;
    const std::size_t offset = real.n;
    out.n += synthetic.n;
    out.features.insert(out.features.end(), synthetic.features.begin(), synthetic.features.end());
    out.labels.insert(out.labels.end(), synthetic.n, kOutlier);
    out.split.insert(out.split.end(), synthetic.n, Split::Train);
    for (const auto& e : synthetic.edges) out.edges.push_back({e.src + offset, e.dst + offset});
    out.edge_time.insert(out.edge_time.end(), synthetic.edge_time.begin(), synthetic.edge_time.end());
    out.edge_type.insert(out.edge_type.end(), synthetic.edge_type.begin(), synthetic.edge_type.end());
    out.validate();
    return out;
}

}  // namespace godm
