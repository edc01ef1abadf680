#pragma once

#include <cstdint>
#include <random>

#include "godm/numerics/tensor.hpp"

namespace godm {

/// Seeded pseudo-random source. Identical seed and call sequence give an
/// identical stream on a given platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    double normal() { return normal_(engine_); }
    /// Uniform on [0, 1).
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    /// Uniform integer on [lo, hi].
    std::size_t uniform_index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
    }
    std::mt19937_64& engine() noexcept { return engine_; }

    /// Independent stream keyed by (seed, stream); does not advance this one.
    Rng derive(std::uint64_t stream) const { return Rng(mix(seed_ ^ mix(stream + 0x9e3779b97f4a7c15ULL))); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Tensor of i.i.d. standard normal entries.
inline Tensor gaussian(Rng& rng, Shape shape) {
    if (shape.empty()) throw ShapeError("gaussian: shape must be non-empty");
    std::vector<double> v(detail::product(shape));
    for (auto& x : v) x = rng.normal();
    return Tensor::from(std::move(shape), std::move(v));
}

}  // namespace godm
