#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "godm/numerics/tensor.hpp"

namespace godm {

struct AdamOptions {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Moment buffers for a fixed list of parameters.
struct AdamState {
    AdamOptions options;
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    std::uint64_t step = 0;

    AdamState() = default;
    AdamState(AdamOptions opt, const std::vector<Tensor>& params) : options(opt) {
        for (const auto& p : params) {
            m.emplace_back(p.numel(), 0.0);
            v.emplace_back(p.numel(), 0.0);
        }
    }
};

/// One bias-corrected Adam update with explicit gradients.
inline void adam_step(AdamState& state, std::span<Tensor> params,
                      std::span<const std::span<const double>> grads) {
    if (params.size() != state.m.size() || grads.size() != params.size()) {
        throw ShapeError("adam_step: " + std::to_string(params.size()) + " parameters, " +
                         std::to_string(grads.size()) + " gradients, state for " + std::to_string(state.m.size()));
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
        if (!grads[k].empty() && grads[k].size() != params[k].numel()) {
            throw ShapeError("adam_step: gradient size mismatch for '" + params[k].name() + "'");
        }
        if (state.m[k].size() != params[k].numel()) {
            throw ShapeError("adam_step: moment buffer size mismatch for '" + params[k].name() + "'");
        }
        for (double g : grads[k])
            if (std::isnan(g)) throw NumericError("adam_step: NaN gradient in parameter '" + params[k].name() + "'");
    }
    const auto& o = state.options;
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(o.beta1, t);
    const double c2 = 1.0 - std::pow(o.beta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto value = params[k].mutable_data();
        auto& m = state.m[k];
        auto& v = state.v[k];
        for (std::size_t i = 0; i < value.size(); ++i) {
            const double g = grads[k].empty() ? 0.0 : grads[k][i];
            m[i] = o.beta1 * m[i] + (1.0 - o.beta1) * g;
            v[i] = o.beta2 * v[i] + (1.0 - o.beta2) * g * g;
            value[i] -= o.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + o.eps);
        }
    }
}

/// Adam update from the parameters' accumulated gradients, which are then cleared.
inline void adam_step(AdamState& state, std::vector<Tensor>& params) {
    std::vector<std::span<const double>> grads;
    grads.reserve(params.size());
    for (const auto& p : params) grads.push_back(p.grad());
    adam_step(state, std::span<Tensor>(params), std::span<const std::span<const double>>(grads));
    for (auto& p : params) p.zero_grad();
}

}  // namespace godm
