#pragma once

#include <cstdint>
#include <limits>

#include "godm/error.hpp"

namespace godm {

/// Training hyperparameters shared by the autoencoder and diffusion stages.
struct TrainConfig {
    double lr = 1e-3;
    std::size_t epochs = 100;
    std::size_t patience = 50;
    double w_x = 1.0;
    double w_e = 0.5;
    double w_t = 1.0;
    double w_p = 0.3;
    double beta = 1e-3;
    std::size_t neg_ratio = 1;
    std::size_t partition_size = 256;  // 2048 for graphs with millions of nodes
    std::size_t diffusion_steps = 50;
    std::uint64_t seed = 0;

    std::size_t hidden = 0;         // latent width; 0 = derived from d
    std::size_t shared_depth = 1;   // GraphSAGE layers before the mean/log-std heads
    std::size_t diffusion_epochs = 0;  // 0 = same as epochs
    std::size_t diffusion_batch = 64;
    std::size_t block_size = 0;     // generation block; 0 = partition_size
    bool stochastic_sampler = false;
    bool heun_sampler = true;  // second-order correction on deterministic steps
    bool sample_types = false;
    bool standardize_latents = true;
    bool balance_diffusion = true;  // oversample y=1 rows to half of each diffusion epoch

    void validate() const {
        if (!(lr > 0.0)) throw ConfigError("lr must be positive");
        if (w_x < 0 || w_e < 0 || w_t < 0 || w_p < 0 || beta < 0) throw ConfigError("loss weights must be >= 0");
        if (!(beta < 1.0)) throw ConfigError("beta must be < 1");
        if (neg_ratio < 1) throw ConfigError("neg_ratio must be >= 1");
        if (partition_size < 2) throw ConfigError("partition_size must be >= 2");
        if (diffusion_steps < 1) throw ConfigError("diffusion_steps must be >= 1");
        if (diffusion_batch < 1) throw ConfigError("diffusion_batch must be >= 1");
        if (shared_depth < 1) throw ConfigError("shared_depth must be >= 1");
    }
    std::size_t effective_block_size() const { return block_size ? block_size : partition_size; }
    std::size_t effective_diffusion_epochs() const { return diffusion_epochs ? diffusion_epochs : epochs; }
};

/// Tracks the best loss and decides when to stop: training ends once
/// max(patience, 1) consecutive epochs fail to improve on the best.
class EarlyStopping {
public:
    explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

    /// Returns true if `loss` is a new best.
    bool update(double loss) {
        if (loss < best_) {
            best_ = loss;
            stale_ = 0;
            return true;
        }
        ++stale_;
        return false;
    }
    bool should_stop() const { return stale_ > 0 && stale_ >= patience_; }
    double best() const { return best_; }

private:
    std::size_t patience_;
    std::size_t stale_ = 0;
    double best_ = std::numeric_limits<double>::infinity();
};

}  // namespace godm
