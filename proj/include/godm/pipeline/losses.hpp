#pragma once

#include <vector>

#include "godm/numerics/tensor.hpp"
#include "godm/pipeline/config.hpp"

namespace godm {

/// Mean over rows of the squared L2 reconstruction error.
inline Tensor loss_feature(const Tensor& x, const Tensor& x_hat) {
    if (x.rows() == 0) throw ShapeError("loss_feature: empty input");
    return ops::scale(ops::sum(ops::square(ops::sub(x, x_hat))), 1.0 / static_cast<double>(x.rows()));
}

/// Binary cross-entropy of edge scores against edge/non-edge targets.
inline Tensor loss_edge(const std::vector<double>& target, const Tensor& scores) {
    return ops::binary_cross_entropy(scores, target);
}

/// Squared error of predicted timestamps, both in normalized units.
inline Tensor loss_time(const std::vector<double>& t, const Tensor& t_hat) {
    return ops::mse(t_hat, Tensor::from(t_hat.shape(), t));
}

/// Mean negative log-probability of the true type; `types` are 1-based.
inline Tensor loss_type(const std::vector<int>& types, const Tensor& dist) {
    std::vector<std::size_t> target(types.size());
    for (std::size_t k = 0; k < types.size(); ++k) target[k] = static_cast<std::size_t>(types[k] - 1);
    return ops::cross_entropy(dist, std::move(target));
}

/// KL(N(μ, σ²) ‖ N(0, 1)) summed over latent dimensions, averaged over rows.
inline Tensor loss_kl(const Tensor& mu, const Tensor& logsigma) {
    Tensor per_entry = ops::sub(ops::add_scalar(ops::add(ops::square(mu), ops::exp(ops::scale(logsigma, 2.0))), -1.0),
                                ops::scale(logsigma, 2.0));
    return ops::scale(ops::sum(per_entry), 0.5 / static_cast<double>(mu.rows()));
}

/// Individual reconstruction and regularization terms; an empty tensor marks
/// a channel the graph does not have.
struct VaeLossTerms {
    Tensor x, e, t, p, kl;
};

inline Tensor loss_vae(const VaeLossTerms& terms, const TrainConfig& cfg) {
    Tensor total = ops::scale(terms.x, cfg.w_x);
    auto accumulate = [&total](const Tensor& term, double w) {
        if (!term.empty()) total = ops::add(total, ops::scale(term, w));
    };
    accumulate(terms.e, cfg.w_e);
    accumulate(terms.t, cfg.w_t);
    accumulate(terms.p, cfg.w_p);
    accumulate(terms.kl, cfg.beta);
    return total;
}

}  // namespace godm
