#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "godm/graph/graph.hpp"
#include "godm/numerics/rng.hpp"

namespace godm {

/// Knobs of the planted-partition benchmark. Inliers form communities whose
/// feature means sit on a binary lattice; outliers carry a shifted mean and
/// link across communities. Node activity (log degree propensity) is
/// heavy-tailed and exposed as the last feature column.
struct BenchmarkSpec {
    std::size_t n = 1000;
    std::size_t d = 16;
    double outlier_frac = 0.05;
    double cohesion = 1.0;  // in [0, 1]; 1 = tight communities, well separated outliers
    int num_types = 0;
    bool with_time = false;
    double mean_degree = 10.0;
    double activity_spread = 1.8;  // std of log propensity
    double activity_scale = 3.0;   // multiplier on the activity feature column
    double outlier_shift = 3.0;
    double lattice_spacing = 3.0;
    std::size_t communities = 0;  // 0 = clamp(n / 125, 2, 16)
    std::int64_t time_horizon = 1000;
};

inline std::size_t benchmark_outlier_count(std::size_t n, double frac) {
    return static_cast<std::size_t>(std::llround(static_cast<double>(n) * frac));
}

/// Assigns train/val/test 40/20/40 within each class.
inline void stratified_split(Graph& g, Rng& rng) {
    g.split.assign(g.n, Split::None);
    for (int cls : {kInlier, kOutlier}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < g.n; ++i)
            if (g.labels[i] == cls) members.push_back(i);
        std::shuffle(members.begin(), members.end(), rng.engine());
        const auto k = static_cast<double>(members.size());
        const auto n_train = static_cast<std::size_t>(std::llround(0.4 * k));
        const auto n_val = std::min(members.size() - n_train, static_cast<std::size_t>(std::llround(0.2 * k)));
        for (std::size_t r = 0; r < members.size(); ++r)
            g.split[members[r]] = r < n_train ? Split::Train : (r < n_train + n_val ? Split::Val : Split::Test);
    }
}

inline Graph make_benchmark(Rng& rng, const BenchmarkSpec& spec) {
    if (!(spec.outlier_frac > 0.0 && spec.outlier_frac < 0.5))
        throw ConfigError("make_benchmark: outlier_frac must lie in (0, 0.5)");
    if (spec.cohesion < 0.0 || spec.cohesion > 1.0) throw ConfigError("make_benchmark: cohesion must lie in [0, 1]");
    if (spec.num_types < 0) throw ConfigError("make_benchmark: P must be >= 0");
    const std::size_t n = spec.n;
    const std::size_t n_out = benchmark_outlier_count(n, spec.outlier_frac);
    if (n_out == 0 || n_out >= n) throw ConfigError("make_benchmark: parameters give an empty class");
    const std::size_t C =
        spec.communities ? spec.communities : std::clamp<std::size_t>(n / 125, 2, 16);
    std::size_t lattice_dims = 1;
    while ((std::size_t{1} << lattice_dims) < C) ++lattice_dims;
    if (spec.d < lattice_dims + 2)
        throw ConfigError("make_benchmark: d must be at least " + std::to_string(lattice_dims + 2));

    Graph g;
    g.n = n;
    g.d = spec.d;
    g.num_types = spec.num_types;
    g.timed = spec.with_time;
    g.labels.assign(n, kInlier);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng.engine());
    for (std::size_t k = 0; k < n_out; ++k) g.labels[order[k]] = kOutlier;
    std::vector<std::size_t> community(n);
    std::shuffle(order.begin(), order.end(), rng.engine());
    for (std::size_t k = 0; k < n; ++k) community[order[k]] = k % C;

    // Outlier shift direction, unit norm over the columns between the lattice and activity.
    const std::size_t shift_lo = lattice_dims, shift_hi = spec.d - 1;
    std::vector<double> direction(spec.d, 0.0);
    double norm = 0.0;
    for (std::size_t j = shift_lo; j < shift_hi; ++j) norm += (direction[j] = rng.normal()) * direction[j];
    norm = std::sqrt(norm);
    for (auto& v : direction) v /= norm;

    const double noise = 0.5 + 1.5 * (1.0 - spec.cohesion);
    std::vector<double> log_activity(n);
    g.features.assign(n * spec.d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double* x = g.features.data() + i * spec.d;
        for (std::size_t j = 0; j < lattice_dims; ++j)
            x[j] = ((community[i] >> j) & 1U) ? spec.lattice_spacing : 0.0;
        if (g.labels[i] == kOutlier)
            for (std::size_t j = 0; j < spec.d; ++j) x[j] += spec.outlier_shift * direction[j];
        for (std::size_t j = 0; j + 1 < spec.d; ++j) x[j] += noise * rng.normal();
        log_activity[i] = rng.normal();
        x[spec.d - 1] = spec.activity_scale * (log_activity[i] + 0.25 * rng.normal());
    }

    // Chung–Lu style sampling with community preference for inliers.
    std::vector<double> weight(n);
    for (std::size_t i = 0; i < n; ++i)
        weight[i] = std::exp(spec.activity_spread * log_activity[i] - 0.5 * spec.activity_spread * spec.activity_spread);
    std::discrete_distribution<std::size_t> any(weight.begin(), weight.end());
    std::vector<std::vector<std::size_t>> inliers_of(C);
    std::vector<std::vector<double>> inlier_w(C);
    for (std::size_t i = 0; i < n; ++i)
        if (g.labels[i] == kInlier) {
            inliers_of[community[i]].push_back(i);
            inlier_w[community[i]].push_back(weight[i]);
        }
    std::vector<std::discrete_distribution<std::size_t>> within;
    for (std::size_t c = 0; c < C; ++c) within.emplace_back(inlier_w[c].begin(), inlier_w[c].end());

    const double intra = 0.5 + 0.45 * spec.cohesion;
    const auto target = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.mean_degree / 2.0));
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t attempt = 0; pairs.size() < target && attempt < 50 * target + 100; ++attempt) {
        const std::size_t i = any(rng.engine());
        std::size_t j = i;
        if (g.labels[i] == kOutlier) {
            for (int tries = 0; tries < 32 && community[j] == community[i]; ++tries) j = any(rng.engine());
            if (community[j] == community[i]) continue;
        } else if (rng.uniform() < intra && !inliers_of[community[i]].empty()) {
            j = inliers_of[community[i]][within[community[i]](rng.engine())];
        } else {
            j = any(rng.engine());
        }
        if (i == j) continue;
        pairs.emplace(std::min(i, j), std::max(i, j));
    }

    std::vector<std::pair<std::size_t, std::size_t>> undirected(pairs.begin(), pairs.end());
    std::vector<std::int64_t> pair_time(undirected.size());
    std::vector<int> pair_type(undirected.size());
    for (std::size_t k = 0; k < undirected.size(); ++k) {
        if (spec.with_time)
            pair_time[k] = static_cast<std::int64_t>(rng.uniform_index(0, static_cast<std::size_t>(spec.time_horizon - 1)));
        if (spec.num_types > 0) pair_type[k] = static_cast<int>(rng.uniform_index(1, static_cast<std::size_t>(spec.num_types)));
    }
    struct Directed {
        std::size_t src, dst, k;
    };
    std::vector<Directed> directed;
    directed.reserve(2 * undirected.size());
    for (std::size_t k = 0; k < undirected.size(); ++k) {
        directed.push_back({undirected[k].first, undirected[k].second, k});
        directed.push_back({undirected[k].second, undirected[k].first, k});
    }
    std::sort(directed.begin(), directed.end(),
              [](const Directed& a, const Directed& b) { return std::tie(a.src, a.dst) < std::tie(b.src, b.dst); });
    for (const auto& e : directed) {
        g.edges.push_back({e.src, e.dst});
        if (spec.with_time) g.edge_time.push_back(pair_time[e.k]);
        if (spec.num_types > 0) g.edge_type.push_back(pair_type[e.k]);
    }

    stratified_split(g, rng);
    g.validate();
    return g;
}

inline Graph make_benchmark(Rng& rng, std::size_t n, std::size_t d, double outlier_frac, double cohesion,
                            int num_types, bool with_time) {
    BenchmarkSpec spec;
    spec.n = n;
    spec.d = d;
    spec.outlier_frac = outlier_frac;
    spec.cohesion = cohesion;
    spec.num_types = num_types;
    spec.with_time = with_time;
    return make_benchmark(rng, spec);
}

}  // namespace godm
