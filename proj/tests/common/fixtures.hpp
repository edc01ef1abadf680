#pragma once

// Small graph builders and a scratch-directory helper shared by the tests.

#include <filesystem>
#include <string>

#include "godm/graph/graph.hpp"
#include "godm/numerics/rng.hpp"

namespace godm::testing {

/// Random labeled graph; every node is masked, about a fifth are outliers.
inline Graph random_graph(Rng& rng, std::size_t n, std::size_t d, std::size_t edges, int num_types = 0,
                          bool timed = false) {
    Graph g;
    g.n = n;
    g.d = d;
    g.num_types = num_types;
    g.timed = timed;
    g.features.resize(n * d);
    for (auto& x : g.features) x = rng.normal() * 3.0;
    for (std::size_t i = 0; i < n; ++i) {
        g.labels.push_back(rng.uniform() < 0.2 ? kOutlier : kInlier);
        const double u = rng.uniform();
        g.split.push_back(u < 0.4 ? Split::Train : (u < 0.6 ? Split::Val : Split::Test));
    }
    for (std::size_t e = 0; e < edges && n > 0; ++e) {
        g.edges.push_back({rng.uniform_index(0, n - 1), rng.uniform_index(0, n - 1)});
        if (timed) g.edge_time.push_back(static_cast<std::int64_t>(rng.uniform_index(0, 5000)));
        if (num_types > 0) g.edge_type.push_back(static_cast<int>(rng.uniform_index(1, static_cast<std::size_t>(num_types))));
    }
    g.validate();
    return g;
}

/// Path 0 → 1 → … → n−1 with unit features, all inliers in the train split.
inline Graph path_graph(std::size_t n) {
    Graph g;
    g.n = n;
    g.d = 1;
    g.features.assign(n, 1.0);
    g.labels.assign(n, kInlier);
    g.split.assign(n, Split::Train);
    for (std::size_t i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1});
    return g;
}

/// Fresh empty directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("godm_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace godm::testing
