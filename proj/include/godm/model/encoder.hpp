#pragma once

// Variational graph encoder: label-conditioned input embedding, GraphSAGE
// layers whose edge messages carry optional type and time corrections, and
// separate mean / log-std heads on top of a shared trunk.

#include <cmath>
#include <string>
#include <vector>

#include "godm/graph/partition.hpp"
#include "godm/model/init.hpp"
#include "godm/numerics/rng.hpp"

namespace godm {

enum class Activation { Relu, Identity };

/// Largest power of two not above d/2, and never below 4.
inline std::size_t latent_width_for(std::size_t d) {
    std::size_t w = 1;
    while (w * 2 <= d / 2) w *= 2;
    return std::max<std::size_t>(w, 4);
}

struct SageLayer {
    Tensor weight;    // out × 2·in
    Tensor type_map;  // in × P, empty when untyped
    Tensor time_map;  // in × in, empty when untimed

    std::size_t in_width() const { return weight.cols() / 2; }
    std::size_t out_width() const { return weight.rows(); }
};

struct EncoderParams {
    Tensor class_vec;  // 1 × d
    std::vector<SageLayer> shared;
    SageLayer mu;
    SageLayer logsigma;

    std::size_t latent_width() const { return mu.out_width(); }

    std::vector<Tensor> parameters() const {
        std::vector<Tensor> out{class_vec};
        auto add = [&out](const SageLayer& l) {
            out.push_back(l.weight);
            if (!l.type_map.empty()) out.push_back(l.type_map);
            if (!l.time_map.empty()) out.push_back(l.time_map);
        };
        for (const auto& l : shared) add(l);
        add(mu);
        add(logsigma);
        return out;
    }
};

inline SageLayer init_sage_layer(Rng& rng, std::size_t in, std::size_t out, int num_types, bool timed,
                                 const std::string& name) {
    SageLayer l;
    l.weight = glorot(rng, out, 2 * in, name + ".weight");
    if (num_types > 0) l.type_map = glorot(rng, in, static_cast<std::size_t>(num_types), name + ".type_map");
    if (timed) {
        if (in % 2 != 0) throw ConfigError(name + ": temporal embedding needs an even input width, got " + std::to_string(in));
        l.time_map = glorot(rng, in, in, name + ".time_map");
    }
    return l;
}

inline EncoderParams init_encoder(Rng& rng, std::size_t d, std::size_t hidden, int num_types, bool timed,
                                  std::size_t shared_depth = 1) {
    if (shared_depth < 1) throw ConfigError("encoder: shared depth must be >= 1");
    EncoderParams p;
    p.class_vec = zero_parameter(1, d, "encoder.class_vec");
    std::size_t in = d;
    for (std::size_t k = 0; k < shared_depth; ++k) {
        p.shared.push_back(init_sage_layer(rng, in, hidden, num_types, timed, "encoder.shared" + std::to_string(k)));
        in = hidden;
    }
    p.mu = init_sage_layer(rng, hidden, hidden, num_types, timed, "encoder.mu");
    p.logsigma = init_sage_layer(rng, hidden, hidden, num_types, timed, "encoder.logsigma");
    // Start from unit posterior variance.
    for (Tensor* t : {&p.logsigma.weight, &p.logsigma.type_map, &p.logsigma.time_map})
        for (auto& v : t->mutable_data()) v = 0.0;
    return p;
}

/// H⁰ = X + y·w_E^C
inline Tensor init_embedding(const Tensor& x, const std::vector<double>& y, const Tensor& class_vec) {
    return add_label_term(x, y, class_vec);
}

/// Trigonometric embedding: entry 2k = sin(t / 10000^{2k/dim}), 2k+1 = cos(same).
inline std::vector<double> temporal_embedding(std::int64_t t, std::size_t dim) {
    if (dim % 2 != 0) throw ConfigError("temporal_embedding: dimension must be even, got " + std::to_string(dim));
    if (t < 0) throw ConfigError("temporal_embedding: timestamp must be non-negative");
    std::vector<double> out(dim);
    for (std::size_t k = 0; 2 * k < dim; ++k) {
        const double angle =
            static_cast<double>(t) / std::pow(10000.0, static_cast<double>(2 * k) / static_cast<double>(dim));
        out[2 * k] = std::sin(angle);
        out[2 * k + 1] = std::cos(angle);
    }
    return out;
}

inline Tensor temporal_embedding_matrix(const std::vector<std::int64_t>& times, std::size_t dim) {
    std::vector<double> v;
    v.reserve(times.size() * dim);
    for (auto t : times) {
        const auto row = temporal_embedding(t, dim);
        v.insert(v.end(), row.begin(), row.end());
    }
    return Tensor::from({times.size(), dim}, std::move(v));
}

inline Tensor one_hot_types(const std::vector<int>& types, int num_types) {
    std::vector<double> v(types.size() * static_cast<std::size_t>(num_types), 0.0);
    for (std::size_t e = 0; e < types.size(); ++e) {
        if (types[e] < 1 || types[e] > num_types)
            throw ConfigError("edge type " + std::to_string(types[e]) + " outside 1.." + std::to_string(num_types));
        v[e * static_cast<std::size_t>(num_types) + static_cast<std::size_t>(types[e] - 1)] = 1.0;
    }
    return Tensor::from({types.size(), static_cast<std::size_t>(num_types)}, std::move(v));
}

/// Edge messages m_ij = h_src [+ W^P·onehot(p)] [+ W^T·TE(t)], one row per edge.
/// Empty `types`/`times` (or an empty map) disables the corresponding term.
inline Tensor edge_messages(const Tensor& h, const std::vector<std::size_t>& src, const std::vector<int>& types,
                            const std::vector<std::int64_t>& times, const SageLayer& layer) {
    Tensor m = ops::gather_rows(h, src);
    if (!layer.type_map.empty() && !types.empty()) {
        const int num_types = static_cast<int>(layer.type_map.cols());
        m = ops::add(m, ops::linear(one_hot_types(types, num_types), layer.type_map));
    }
    if (!layer.time_map.empty() && !times.empty()) {
        m = ops::add(m, ops::linear(temporal_embedding_matrix(times, h.cols()), layer.time_map));
    }
    return m;
}

/// H^l = ACT(W^l · [H^{l−1} | mean of incoming messages]); nodes without
/// incoming edges aggregate to zero.
inline Tensor sage_layer(const Tensor& h, const Tensor& messages, const std::vector<std::size_t>& dst,
                         const Tensor& weight, Activation act = Activation::Relu) {
    Tensor agg = ops::segment_mean(messages, dst, h.rows());
    Tensor out = ops::linear(ops::concat_cols(h, agg), weight);
    return act == Activation::Relu ? ops::relu(out) : out;
}

inline Tensor apply_layer(const Tensor& h, const Subgraph& g, const SageLayer& layer, Activation act,
                          const std::string& name) {
    Tensor msg = edge_messages(h, g.src, g.type, g.time, layer);
    Tensor out = sage_layer(h, msg, g.dst, layer.weight, act);
    ops::require_finite(out, "encoder layer '" + name + "'");
    return out;
}

struct LatentBatch {
    Tensor z;
    Tensor mu;
    Tensor logsigma;
    std::vector<double> y;
};

/// Encodes a subgraph with caller-supplied reparameterization noise (m × d^L).
inline LatentBatch encode(const Subgraph& g, const EncoderParams& p, const Tensor& noise) {
    if (g.d != p.class_vec.cols())
        throw ShapeError("encode: subgraph has d = " + std::to_string(g.d) + ", encoder expects " +
                         std::to_string(p.class_vec.cols()));
    const std::size_t m = g.size();
    if (noise.rows() != m || noise.cols() != p.latent_width())
        throw ShapeError("encode: noise must be " + std::to_string(m) + "x" + std::to_string(p.latent_width()));
    Tensor h = init_embedding(Tensor::from({m, g.d}, g.features), g.y, p.class_vec);
    for (std::size_t k = 0; k < p.shared.size(); ++k)
        h = apply_layer(h, g, p.shared[k], Activation::Relu, "shared" + std::to_string(k));
    LatentBatch out;
    out.mu = apply_layer(h, g, p.mu, Activation::Identity, "mu");
    out.logsigma = apply_layer(h, g, p.logsigma, Activation::Identity, "logsigma");
    out.z = ops::add(out.mu, ops::mul(ops::exp(out.logsigma), noise));
    ops::require_finite(out.z, "encoder reparameterization");
    out.y = g.y;
    return out;
}

inline LatentBatch encode(const Subgraph& g, const EncoderParams& p, Rng& rng) {
    if (g.size() == 0) throw ShapeError("encode: empty subgraph");
    return encode(g, p, gaussian(rng, {g.size(), p.latent_width()}));
}

}  // namespace godm
