#pragma once

#include <optional>
#include <string>

#include "godm/graph/batch.hpp"
#include "godm/pipeline/checkpoint.hpp"

namespace godm {

/// Number of synthetic outliers generated when none is requested.
inline std::size_t default_synthetic_count(const Graph& g) { return g.count(Split::Train, kOutlier); }

/// Synthetic outlier graph: latents drawn conditioned on y = 1, mapped back
/// to the autoencoder's latent space and decoded.
inline Graph synthesize(const GodmModel& m, std::size_t count, std::uint64_t seed) {
    Rng rng = stream(seed, Stream::Augment);
    SamplerOptions so;
    so.stochastic = m.config.stochastic_sampler;
    so.heun = m.config.heun_sampler;
    const Tensor z = m.latent_scaler.invert(sample_latents(m.diffusion, count, rng, so));
    GenerateOptions go;
    go.block_size = m.config.effective_block_size();
    go.num_types = m.vae.num_types;
    go.timed = m.vae.timed;
    go.time_scaler = m.vae.time_scaler;
    go.sample_types = m.config.sample_types;
    return generate_graph(z, std::vector<double>(count, 1.0), m.vae.generator, go, &rng).graph;
}

/// Real graph plus `count` synthetic outliers (default: the number of
/// training outliers). The real part is returned unchanged.
inline Graph augment(const Graph& g, const GodmModel& m, std::optional<std::size_t> count, std::uint64_t seed) {
    check_compatible(m, g);
    std::size_t n_hat = 0;
    if (count) {
        n_hat = *count;
    } else {
        n_hat = default_synthetic_count(g);
        if (n_hat == 0)
            throw ConfigError("augment: the graph has no training outliers; pass an explicit synthetic count");
    }
    if (n_hat == 0) return g;
    return batch_graphs(g, synthesize(m, n_hat, seed));
}

}  // namespace godm
