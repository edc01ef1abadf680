#pragma once

// Graph generator: decodes label-conditioned latent rows into node features,
// directed edges (pairwise scores thresholded at 0.5), edge types and edge
// timestamps.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "godm/graph/graph.hpp"
#include "godm/model/init.hpp"
#include "godm/numerics/rng.hpp"

namespace godm {

struct GeneratorParams {
    Tensor class_vec;    // 1 × d^L
    Tensor feature_map;  // d × d^L
    Tensor edge_vec;     // 1 × 2d^L
    Tensor type_map;     // P × 2d^L, empty when untyped
    Tensor time_vec;     // 1 × 2d^L, empty when untimed

    std::vector<Tensor> parameters() const {
        std::vector<Tensor> out{class_vec, feature_map, edge_vec};
        if (!type_map.empty()) out.push_back(type_map);
        if (!time_vec.empty()) out.push_back(time_vec);
        return out;
    }
};

inline GeneratorParams init_generator(Rng& rng, std::size_t d, std::size_t latent, int num_types, bool timed) {
    GeneratorParams p;
    p.class_vec = zero_parameter(1, latent, "generator.class_vec");
    p.feature_map = glorot(rng, d, latent, "generator.feature_map");
    // Pairwise heads start at zero: edge score 0.5, uniform types, time at the range minimum.
    p.edge_vec = zero_parameter(1, 2 * latent, "generator.edge_vec");
    if (num_types > 0) p.type_map = zero_parameter(static_cast<std::size_t>(num_types), 2 * latent, "generator.type_map");
    if (timed) p.time_vec = zero_parameter(1, 2 * latent, "generator.time_vec");
    return p;
}

/// Min-max map of training timestamps onto [0, 1].
struct TimeScaler {
    double min = 0.0;
    double max = 0.0;

    static TimeScaler fit(const std::vector<std::int64_t>& t) {
        TimeScaler s;
        if (t.empty()) return s;
        const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
        s.min = static_cast<double>(*lo);
        s.max = static_cast<double>(*hi);
        return s;
    }
    double normalize(std::int64_t t) const {
        return max > min ? (static_cast<double>(t) - min) / (max - min) : 0.0;
    }
    /// Inverse map, rounded to the nearest integer and clamped at 0.
    std::int64_t denormalize(double u) const {
        const double raw = min + u * (max - min);
        return std::max<std::int64_t>(0, std::llround(raw));
    }
};

/// z_i^C = z_i + w_G^C · y_i
inline Tensor condition(const Tensor& z, const std::vector<double>& y, const Tensor& class_vec) {
    return add_label_term(z, y, class_vec);
}

/// X̂ = Z^C · (W_G^F)ᵀ
inline Tensor decode_features(const Tensor& zc, const Tensor& feature_map) { return ops::linear(zc, feature_map); }

/// Row k = [z_{i_k}^C | z_{j_k}^C].
inline Tensor pair_features(const Tensor& zc, const std::vector<std::size_t>& i, const std::vector<std::size_t>& j) {
    return ops::concat_cols(ops::gather_rows(zc, i), ops::gather_rows(zc, j));
}

/// ê = sigmoid(w_G^E · [z_i^C | z_j^C]); returns a column, one score per pair.
inline Tensor score_edges(const Tensor& pairs, const Tensor& edge_vec) {
    return ops::sigmoid(ops::linear(pairs, edge_vec));
}

/// Pairs whose score reaches 0.5 (inclusive).
inline std::vector<Edge> decide_edges(std::span<const double> scores, const std::vector<std::size_t>& i,
                                      const std::vector<std::size_t>& j) {
    std::vector<Edge> out;
    for (std::size_t k = 0; k < scores.size(); ++k)
        if (scores[k] >= 0.5) out.push_back({i[k], j[k]});
    return out;
}

/// softmax(W_G^P · [z_i^C | z_j^C]) per pair.
inline Tensor type_distribution(const Tensor& pairs, const Tensor& type_map) {
    if (type_map.empty()) throw ConfigError("predict_type: graph has no edge types");
    return ops::softmax_rows(ops::linear(pairs, type_map));
}

/// Argmax type (1-based); ties go to the smallest id.
inline std::vector<int> argmax_types(const Tensor& dist) {
    std::vector<int> out(dist.rows());
    for (std::size_t r = 0; r < dist.rows(); ++r) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < dist.cols(); ++c)
            if (dist.at(r, c) > dist.at(r, best)) best = c;
        out[r] = static_cast<int>(best) + 1;
    }
    return out;
}

/// Draws a type per row from the distribution (1-based).
inline std::vector<int> sample_types(const Tensor& dist, Rng& rng) {
    std::vector<int> out(dist.rows());
    for (std::size_t r = 0; r < dist.rows(); ++r) {
        double u = rng.uniform(), acc = 0.0;
        std::size_t c = 0;
        for (; c + 1 < dist.cols(); ++c) {
            acc += dist.at(r, c);
            if (u < acc) break;
        }
        out[r] = static_cast<int>(c) + 1;
    }
    return out;
}

/// t̂ = w_G^T · [z_i^C | z_j^C] in normalized time units; one value per pair.
inline Tensor predict_time(const Tensor& pairs, const Tensor& time_vec) {
    if (time_vec.empty()) throw ConfigError("predict_time: graph has no time channel");
    return ops::linear(pairs, time_vec);
}

struct GenerateOptions {
    std::size_t block_size = 256;
    int num_types = 0;
    bool timed = false;
    TimeScaler time_scaler;
    bool sample_types = false;
};

struct GeneratedGraph {
    Graph graph;
    std::size_t pairs_scored = 0;
};

/// Decodes latent rows into a synthetic graph. Edges are only scored between
/// distinct nodes of the same consecutive block of `block_size` rows.
inline GeneratedGraph generate_graph(const Tensor& z0, const std::vector<double>& y, const GeneratorParams& p,
                                     const GenerateOptions& opt, Rng* rng = nullptr) {
    if (opt.block_size < 1) throw ConfigError("generate_graph: block size must be >= 1");
    if (opt.sample_types && rng == nullptr) throw ConfigError("generate_graph: type sampling needs an rng");
    NoGradGuard no_grad;
    GeneratedGraph out;
    Graph& g = out.graph;
    g.n = z0.rows();
    g.d = p.feature_map.rows();
    g.num_types = opt.num_types;
    g.timed = opt.timed;
    g.labels.assign(g.n, kOutlier);
    g.split.assign(g.n, Split::None);
    if (g.n == 0) return out;

    const Tensor zc = condition(z0, y, p.class_vec);
    const Tensor x = decode_features(zc, p.feature_map);
    g.features = x.values();

    for (std::size_t start = 0; start < g.n; start += opt.block_size) {
        const std::size_t stop = std::min(g.n, start + opt.block_size);
        std::vector<std::size_t> is, js;
        for (std::size_t a = start; a < stop; ++a)
            for (std::size_t b = start; b < stop; ++b)
                if (a != b) {
                    is.push_back(a);
                    js.push_back(b);
                }
        if (is.empty()) continue;
        out.pairs_scored += is.size();
        const Tensor pf = pair_features(zc, is, js);
        const Tensor scores = score_edges(pf, p.edge_vec);
        const auto edges = decide_edges(scores.data(), is, js);
        if (edges.empty()) continue;
        std::vector<std::size_t> ki, kj;
        for (const auto& e : edges) {
            g.edges.push_back(e);
            ki.push_back(e.src);
            kj.push_back(e.dst);
        }
        const Tensor kpf = pair_features(zc, ki, kj);
        if (opt.num_types > 0) {
            const Tensor dist = type_distribution(kpf, p.type_map);
            const auto types = opt.sample_types ? sample_types(dist, *rng) : argmax_types(dist);
            g.edge_type.insert(g.edge_type.end(), types.begin(), types.end());
        }
        if (opt.timed) {
            const Tensor t = predict_time(kpf, p.time_vec);
            for (double u : t.data()) g.edge_time.push_back(opt.time_scaler.denormalize(u));
        }
    }
    g.validate();
    return out;
}

}  // namespace godm
