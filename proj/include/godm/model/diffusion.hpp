#pragma once

// Variance-exploding latent diffusion with linear noise level σ(s) = s:
// forward kernel Z^s = Z^0 + s·ε, ε-prediction denoiser trained by
// denoising score matching, and a reverse-time sampler over a curved σ grid.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "godm/model/init.hpp"
#include "godm/numerics/rng.hpp"

namespace godm {

struct NoiseSchedule {
    double sigma_min = 0.002;
    double sigma_max = 80.0;
    double rho = 7.0;
    std::size_t steps = 50;
    double p_mean = -1.2;  // training σ: ln σ ~ N(p_mean, p_std²)
    double p_std = 1.2;

    void validate() const {
        if (!(sigma_min > 0.0 && sigma_min < sigma_max)) throw ConfigError("noise schedule: need 0 < sigma_min < sigma_max");
        if (steps < 1) throw ConfigError("noise schedule: steps must be >= 1");
        if (!(rho > 0.0)) throw ConfigError("noise schedule: rho must be positive");
        if (!(p_std > 0.0)) throw ConfigError("noise schedule: p_std must be positive");
    }
};

/// s_i = (σ_max^{1/ρ} + i/(N−1)·(σ_min^{1/ρ} − σ_max^{1/ρ}))^ρ for i < N, then s_N = 0.
/// A single-step schedule is {σ_max, 0}.
inline std::vector<double> sigma_grid(const NoiseSchedule& s) {
    s.validate();
    std::vector<double> grid(s.steps + 1, 0.0);
    const double hi = std::pow(s.sigma_max, 1.0 / s.rho);
    const double lo = std::pow(s.sigma_min, 1.0 / s.rho);
    for (std::size_t i = 0; i < s.steps; ++i) {
        const double frac = s.steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(s.steps - 1);
        grid[i] = std::pow(hi + frac * (lo - hi), s.rho);
    }
    grid[0] = s.sigma_max;
    if (s.steps > 1) grid[s.steps - 1] = s.sigma_min;
    return grid;
}

/// Z^s = Z^0 + s·ε
inline Tensor perturb(const Tensor& z0, double s, const Tensor& eps) { return ops::add(z0, ops::scale(eps, s)); }

/// Row-wise noise levels: Z^s[r] = Z^0[r] + s_r·ε[r].
inline Tensor perturb(const Tensor& z0, const std::vector<double>& s, const Tensor& eps) {
    if (s.size() != z0.rows()) throw ShapeError("perturb: one noise level per row required");
    std::vector<double> scaled(eps.numel());
    const std::size_t n = eps.cols();
    for (std::size_t r = 0; r < s.size(); ++r)
        for (std::size_t j = 0; j < n; ++j) scaled[r * n + j] = s[r];
    return ops::add(z0, ops::mul(Tensor::from(eps.shape(), std::move(scaled)), eps));
}

/// Z^s_C = Z^s + y·W^C
inline Tensor condition_latent(const Tensor& zs, const std::vector<double>& y, const Tensor& cond_row) {
    return add_label_term(zs, y, cond_row);
}

/// ln s ~ N(p_mean, p_std²), clamped to [σ_min, σ_max].
inline double sample_train_sigma(Rng& rng, const NoiseSchedule& s) {
    return std::clamp(std::exp(s.p_mean + s.p_std * rng.normal()), s.sigma_min, s.sigma_max);
}

/// Score estimate −ε̂ / s.
inline Tensor score_from_eps(const Tensor& eps_hat, double s) {
    if (!(s > 0.0)) throw ConfigError("score_from_eps: noise level must be positive");
    return ops::scale(eps_hat, -1.0 / s);
}

/// Five dense layers with ReLU in between. Input: the conditioned perturbed
/// latent, optionally scaled by 1/√(s²+1), plus one channel holding ln(s)/4.
/// With `skip` set the prediction is s/(s²+1)·z + F/√(s²+1), where F is the
/// network output: the first term is the exact noise estimate for unit-variance
/// data, so F only corrects it and its errors are not amplified at large s.
struct Denoiser {
    std::vector<Tensor> weights;  // out × in
    std::vector<Tensor> biases;   // 1 × out
    bool input_scaling = true;
    bool skip = true;

    std::size_t latent_width() const { return weights.back().rows(); }

    std::vector<Tensor> parameters() const {
        std::vector<Tensor> out;
        for (std::size_t k = 0; k < weights.size(); ++k) {
            out.push_back(weights[k]);
            out.push_back(biases[k]);
        }
        return out;
    }

    /// ε̂ for each row of `zc` at its noise level.
    Tensor forward(const Tensor& zc, const std::vector<double>& sigma) const {
        if (zc.cols() != latent_width()) throw ShapeError("denoiser: latent width mismatch");
        if (sigma.size() != zc.rows()) throw ShapeError("denoiser: one noise level per row required");
        const std::size_t m = zc.rows(), w = zc.cols();
        std::vector<double> embed(m), c_in(m * w), c_skip(m * w), c_out(m * w);
        for (std::size_t r = 0; r < m; ++r) {
            const double s = sigma[r];
            if (!(s > 0.0)) throw ConfigError("denoiser: noise level must be positive");
            embed[r] = std::log(s) / 4.0;
            const double root = std::sqrt(s * s + 1.0);
            for (std::size_t j = 0; j < w; ++j) {
                c_in[r * w + j] = input_scaling ? 1.0 / root : 1.0;
                c_skip[r * w + j] = s / (s * s + 1.0);
                c_out[r * w + j] = 1.0 / root;
            }
        }
        Tensor h = ops::concat_cols(ops::mul(zc, Tensor::from({m, w}, std::move(c_in))), column(embed));
        for (std::size_t k = 0; k < weights.size(); ++k) {
            h = ops::add_row(ops::linear(h, weights[k]), biases[k]);
            if (k + 1 < weights.size()) h = ops::relu(h);
        }
        if (!skip) return h;
        return ops::add(ops::mul(zc, Tensor::from({m, w}, std::move(c_skip))),
                        ops::mul(h, Tensor::from({m, w}, std::move(c_out))));
    }
};

inline Denoiser init_denoiser(Rng& rng, std::size_t latent, std::size_t hidden = 0, std::size_t layers = 5) {
    if (layers < 2) throw ConfigError("denoiser: need at least two layers");
    if (hidden == 0) hidden = 2 * latent;
    Denoiser net;
    std::size_t in = latent + 1;
    for (std::size_t k = 0; k < layers; ++k) {
        const std::size_t out = k + 1 == layers ? latent : hidden;
        net.weights.push_back(glorot(rng, out, in, "denoiser.w" + std::to_string(k)));
        net.biases.push_back(zero_parameter(1, out, "denoiser.b" + std::to_string(k)));
        in = out;
    }
    return net;
}

struct DiffusionModel {
    Denoiser net;
    Tensor cond_row;  // 1 × d^L
    NoiseSchedule schedule;

    std::vector<Tensor> parameters() const {
        auto p = net.parameters();
        p.push_back(cond_row);
        return p;
    }
};

inline DiffusionModel init_diffusion(Rng& rng, std::size_t latent, NoiseSchedule schedule = {}, std::size_t hidden = 0) {
    schedule.validate();
    DiffusionModel m;
    m.net = init_denoiser(rng, latent, hidden);
    m.cond_row = zero_parameter(1, latent, "diffusion.cond_row");
    m.schedule = schedule;
    return m;
}

/// Denoising score matching on a batch of clean latents: mean over rows and
/// dimensions of (ε_θ(Z^s_C, s) − ε)², one σ per row.
inline Tensor denoise_loss(const DiffusionModel& model, const Tensor& z0, const std::vector<double>& y, Rng& rng) {
    std::vector<double> sigma(z0.rows());
    for (auto& s : sigma) s = sample_train_sigma(rng, model.schedule);
    const Tensor eps = gaussian(rng, {z0.rows(), z0.cols()});
    const Tensor zc = condition_latent(perturb(z0, sigma, eps), y, model.cond_row);
    Tensor loss = ops::mse(model.net.forward(zc, sigma), eps);
    if (std::isnan(loss.item())) throw NumericError("denoise_loss: NaN loss");
    return loss;
}

/// ε̂ for conditioned latents at a single noise level.
using EpsPredictor = std::function<Tensor(const Tensor& zc, double s)>;

inline EpsPredictor model_predictor(const DiffusionModel& model) {
    return [&model](const Tensor& zc, double s) {
        return model.net.forward(zc, std::vector<double>(zc.rows(), s));
    };
}

struct SamplerOptions {
    bool stochastic = false;  // Euler–Maruyama on the reverse SDE instead of the probability-flow ODE
    bool heun = false;        // trapezoidal correction of each deterministic step that ends above 0
};

/// Draws n rows from the learned conditional latent distribution, conditioning
/// every denoiser call with label y (a 1×d^L `cond_row` times y).
inline Tensor sample_latents(const EpsPredictor& predict, const Tensor& cond_row, std::size_t n,
                             const NoiseSchedule& schedule, Rng& rng, double y = 1.0, SamplerOptions opt = {}) {
    const std::size_t w = cond_row.numel();
    if (n == 0) return Tensor::zeros({0, w});
    NoGradGuard no_grad;
    const auto grid = sigma_grid(schedule);
    Tensor z = ops::scale(gaussian(rng, {n, w}), grid[0]);
    const std::vector<double> labels(n, y);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double s = grid[i], next = grid[i + 1];
        const Tensor eps_hat = predict(condition_latent(z, labels, cond_row), s);
        const Tensor score = score_from_eps(eps_hat, s);
        if (!opt.stochastic) {
            // dZ/ds = −σ̇σ·∇log p with σ(s) = s, stepped from s down to next
            const Tensor euler = ops::add(z, ops::scale(score, (s - next) * s));
            if (opt.heun && next > 0.0) {
                const Tensor score_next = score_from_eps(predict(condition_latent(euler, labels, cond_row), next), next);
                const Tensor slope = ops::add(ops::scale(score, s), ops::scale(score_next, next));
                z = ops::add(z, ops::scale(slope, 0.5 * (s - next)));
            } else {
                z = euler;
            }
        } else {
            // dZ = −2σ̇σ·∇log p ds + √(2σ̇σ) dω, integrated backwards in s
            const double ds = s - next;
            z = ops::add(z, ops::scale(score, 2.0 * s * ds));
            if (next > 0.0) z = ops::add(z, ops::scale(gaussian(rng, {n, w}), std::sqrt(2.0 * s * ds)));
        }
        ops::require_finite(z, "sample_latents step " + std::to_string(i));
    }
    return z;
}

inline Tensor sample_latents(const DiffusionModel& model, std::size_t n, Rng& rng, SamplerOptions opt = {}) {
    return sample_latents(model_predictor(model), model.cond_row, n, model.schedule, rng, 1.0, opt);
}

}  // namespace godm
