#pragma once

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "godm/graph/partition.hpp"
#include "godm/numerics/rng.hpp"

namespace godm {

struct LabeledPair {
    std::size_t i = 0;
    std::size_t j = 0;
    double label = 0.0;  // 1 = edge, 0 = non-edge
};

/// Positives (every edge of the subgraph, in order) followed by sampled negatives.
struct EdgeTrainSet {
    std::vector<LabeledPair> pairs;
    std::size_t positives = 0;
    std::size_t negatives = 0;
    std::size_t skipped = 0;  // negatives abandoned after the attempt cap

    bool has_warning() const noexcept { return skipped > 0; }
};

inline constexpr int kNegativeAttempts = 100;

/// Uniform negative sampling within a subgraph: `ratio` non-edges per edge,
/// no self-pairs, no duplicates, rejection-sampled against the edge set.
inline EdgeTrainSet negative_sample(Rng& rng, const Subgraph& s, std::size_t ratio) {
    if (ratio < 1) throw ConfigError("negative_sample: ratio must be >= 1");
    EdgeTrainSet out;
    const std::size_t m = s.size();
    const auto key = [m](std::size_t i, std::size_t j) { return static_cast<std::uint64_t>(i) * m + j; };
    std::unordered_set<std::uint64_t> existing;
    existing.reserve(s.num_edges() * 2);
    std::size_t off_diagonal_edges = 0;
    for (std::size_t e = 0; e < s.num_edges(); ++e) {
        out.pairs.push_back({s.src[e], s.dst[e], 1.0});
        if (existing.insert(key(s.src[e], s.dst[e])).second && s.src[e] != s.dst[e]) ++off_diagonal_edges;
    }
    out.positives = s.num_edges();

    const std::size_t wanted = ratio * out.positives;
    const std::size_t capacity = m < 2 ? 0 : m * (m - 1) - off_diagonal_edges;
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(wanted * 2);
    for (std::size_t k = 0; k < wanted; ++k) {
        if (chosen.size() >= capacity) {
            out.skipped += wanted - k;
            break;
        }
        bool placed = false;
        for (int attempt = 0; attempt < kNegativeAttempts && !placed; ++attempt) {
            const std::size_t i = rng.uniform_index(0, m - 1);
            const std::size_t j = rng.uniform_index(0, m - 1);
            if (i == j) continue;
            const auto kij = key(i, j);
            if (existing.count(kij) || !chosen.insert(kij).second) continue;
            out.pairs.push_back({i, j, 0.0});
            placed = true;
        }
        if (!placed) ++out.skipped;
    }
    out.negatives = out.pairs.size() - out.positives;
    return out;
}

}  // namespace godm
