#pragma once

#include <cmath>
#include <string>

#include "godm/numerics/rng.hpp"

namespace godm {

/// Glorot-uniform parameter of shape rows×cols.
inline Tensor glorot(Rng& rng, std::size_t rows, std::size_t cols, std::string name) {
    const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::vector<double> v(rows * cols);
    for (auto& x : v) x = (2.0 * rng.uniform() - 1.0) * a;
    return Tensor::parameter({rows, cols}, std::move(v), std::move(name));
}

inline Tensor zero_parameter(std::size_t rows, std::size_t cols, std::string name) {
    return Tensor::parameter({rows, cols}, std::vector<double>(rows * cols, 0.0), std::move(name));
}

/// Column vector m×1 holding constants.
inline Tensor column(const std::vector<double>& v) { return Tensor::from({v.size(), 1}, v); }

/// x + y·w, with y one scalar per row and w a 1×n row.
inline Tensor add_label_term(const Tensor& x, const std::vector<double>& y, const Tensor& w) {
    if (y.size() != x.rows())
        throw ShapeError("label conditioning: " + std::to_string(y.size()) + " labels for " +
                         std::to_string(x.rows()) + " rows");
    if (w.numel() != x.cols())
        throw ShapeError("label conditioning: vector of width " + std::to_string(w.numel()) + " for " +
                         std::to_string(x.cols()) + " columns");
    return ops::add(x, ops::matmul(column(y), w));
}

}  // namespace godm
