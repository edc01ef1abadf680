#pragma once

// Training of the generative stack: the variational graph autoencoder over
// graph partitions, then the latent diffusion model on the per-node means.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "godm/graph/partition.hpp"
#include "godm/graph/sampling.hpp"
#include "godm/model/diffusion.hpp"
#include "godm/model/encoder.hpp"
#include "godm/model/generator.hpp"
#include "godm/numerics/adam.hpp"
#include "godm/pipeline/config.hpp"
#include "godm/pipeline/losses.hpp"

namespace godm {

/// Rng streams derived from the run seed.
enum class Stream : std::uint64_t { VaeInit = 1, VaeTrain, DiffusionInit, DiffusionTrain, Augment, Detector };

inline Rng stream(std::uint64_t seed, Stream s) { return Rng(seed).derive(static_cast<std::uint64_t>(s)); }

/// Labels the generative model may see: train-mask labels, everything else 0.
inline std::vector<double> visible_labels(const Graph& g) {
    std::vector<double> y(g.n, 0.0);
    for (std::size_t i = 0; i < g.n; ++i)
        if (g.split[i] == Split::Train) y[i] = numeric_label(g.labels[i]);
    return y;
}

struct VaeModel {
    EncoderParams encoder;
    GeneratorParams generator;
    TimeScaler time_scaler;
    std::size_t d = 0;
    int num_types = 0;
    bool timed = false;

    std::size_t latent_width() const { return encoder.latent_width(); }

    std::vector<Tensor> parameters() const {
        auto p = encoder.parameters();
        auto q = generator.parameters();
        p.insert(p.end(), q.begin(), q.end());
        return p;
    }
};

inline VaeModel init_vae(Rng& rng, std::size_t d, int num_types, bool timed, const TrainConfig& cfg) {
    VaeModel m;
    m.d = d;
    m.num_types = num_types;
    m.timed = timed;
    const std::size_t width = cfg.hidden ? cfg.hidden : latent_width_for(d);
    m.encoder = init_encoder(rng, d, width, num_types, timed, cfg.shared_depth);
    m.generator = init_generator(rng, d, width, num_types, timed);
    return m;
}

/// Per-epoch losses; channels the graph lacks stay at 0.
struct VaeEpochLoss {
    std::size_t epoch = 0;
    double x = 0, e = 0, t = 0, p = 0, kl = 0, total = 0;
};

struct PartitionLoss {
    VaeLossTerms terms;
    Tensor total;
    EdgeTrainSet edges;
};

/// Forward pass on one partition: encode, condition, decode, and score the
/// subgraph's edges against sampled non-edges.
inline PartitionLoss vae_partition_loss(const VaeModel& m, const Subgraph& sub, const TrainConfig& cfg, Rng& rng) {
    PartitionLoss out;
    const LatentBatch lb = encode(sub, m.encoder, rng);
    const Tensor zc = condition(lb.z, sub.y, m.generator.class_vec);
    const Tensor x = Tensor::from({sub.size(), sub.d}, sub.features);
    out.terms.x = loss_feature(x, decode_features(zc, m.generator.feature_map));
    out.terms.kl = loss_kl(lb.mu, lb.logsigma);

    out.edges = negative_sample(rng, sub, cfg.neg_ratio);
    if (!out.edges.pairs.empty()) {
        std::vector<std::size_t> is, js;
        std::vector<double> target;
        for (const auto& pr : out.edges.pairs) {
            is.push_back(pr.i);
            js.push_back(pr.j);
            target.push_back(pr.label);
        }
        out.terms.e = loss_edge(target, score_edges(pair_features(zc, is, js), m.generator.edge_vec));
    }
    if (sub.num_edges() > 0 && (sub.timed || sub.num_types > 0)) {
        const Tensor pos = pair_features(zc, sub.src, sub.dst);
        if (sub.timed) {
            std::vector<double> t(sub.num_edges());
            for (std::size_t e = 0; e < t.size(); ++e) t[e] = m.time_scaler.normalize(sub.time[e]);
            out.terms.t = loss_time(t, predict_time(pos, m.generator.time_vec));
        }
        if (sub.num_types > 0) out.terms.p = loss_type(sub.type, type_distribution(pos, m.generator.type_map));
    }
    out.total = loss_vae(out.terms, cfg);
    return out;
}

inline std::vector<std::vector<double>> snapshot(const std::vector<Tensor>& params) {
    std::vector<std::vector<double>> out;
    for (const auto& p : params) out.push_back(p.values());
    return out;
}

inline void restore(std::vector<Tensor> params, const std::vector<std::vector<double>>& values) {
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto dst = params[k].mutable_data();
        std::copy(values[k].begin(), values[k].end(), dst.begin());
    }
}

struct VaeResult {
    VaeModel model;
    Tensor mu;  // n × d^L, per-node latent means
    std::vector<VaeEpochLoss> history;
    std::size_t best_epoch = 0;
    std::size_t negatives_skipped = 0;
};

/// Per-node latent means, each partition encoded on its own subgraph.
inline Tensor latent_means(const VaeModel& m, const Graph& g, const Partitioning& parts, const std::vector<double>& y) {
    NoGradGuard no_grad;
    const std::size_t w = m.latent_width();
    std::vector<double> mu(g.n * w, 0.0);
    for (const auto& nodes : parts.members) {
        const Subgraph sub = extract_subgraph(g, nodes, y);
        const LatentBatch lb = encode(sub, m.encoder, Tensor::zeros({sub.size(), w}));
        for (std::size_t k = 0; k < nodes.size(); ++k)
            for (std::size_t j = 0; j < w; ++j) mu[nodes[k] * w + j] = lb.mu.at(k, j);
    }
    return Tensor::from({g.n, w}, std::move(mu));
}

inline VaeResult train_vae(const Graph& g, const TrainConfig& cfg) {
    cfg.validate();
    g.validate();
    if (g.count(Split::Train, kInlier) + g.count(Split::Train, kOutlier) == 0)
        throw ConfigError("train_vae: graph has no labeled training node");
    if (g.n == 0) throw ConfigError("train_vae: empty graph");

    Rng init_rng = stream(cfg.seed, Stream::VaeInit);
    Rng rng = stream(cfg.seed, Stream::VaeTrain);
    VaeResult res;
    res.model = init_vae(init_rng, g.d, g.num_types, g.timed, cfg);
    VaeModel& m = res.model;
    m.time_scaler = TimeScaler::fit(g.edge_time);

    const std::vector<double> y = visible_labels(g);
    const Partitioning parts = partition_graph(g, cfg.partition_size);
    std::vector<Subgraph> subs;
    for (const auto& nodes : parts.members) subs.push_back(extract_subgraph(g, nodes, y));

    std::vector<Tensor> params = m.parameters();
    AdamState adam({cfg.lr}, params);
    EarlyStopping stopper(cfg.patience);
    auto best = snapshot(params);

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        VaeEpochLoss row;
        row.epoch = epoch;
        double weight = 0.0;
        for (std::size_t k = 0; k < subs.size(); ++k) {
            PartitionLoss pl = vae_partition_loss(m, subs[k], cfg, rng);
            const double total = pl.total.item();
            if (!std::isfinite(total))
                throw NumericError("train_vae: non-finite loss at epoch " + std::to_string(epoch) + ", partition " +
                                   std::to_string(k));
            res.negatives_skipped += pl.edges.skipped;
            const double wk = static_cast<double>(subs[k].size());
            auto acc = [wk](double& slot, const Tensor& t) {
                if (!t.empty()) slot += wk * t.item();
            };
            acc(row.x, pl.terms.x);
            acc(row.e, pl.terms.e);
            acc(row.t, pl.terms.t);
            acc(row.p, pl.terms.p);
            acc(row.kl, pl.terms.kl);
            row.total += wk * total;
            weight += wk;
            backward(pl.total);
            try {
                adam_step(adam, params);
            } catch (const NumericError& err) {
                throw NumericError(std::string(err.what()) + " (epoch " + std::to_string(epoch) + ", partition " +
                                   std::to_string(k) + ")");
            }
        }
        for (double* slot : {&row.x, &row.e, &row.t, &row.p, &row.kl, &row.total}) *slot /= weight;
        res.history.push_back(row);
        if (stopper.update(row.total)) {
            best = snapshot(params);
            res.best_epoch = epoch;
        }
        if (stopper.should_stop()) break;
    }
    restore(params, best);
    res.mu = latent_means(m, g, parts, y);
    return res;
}

/// Per-dimension affine standardization of latents.
struct LatentScaler {
    std::vector<double> mean;
    std::vector<double> scale;

    static LatentScaler identity(std::size_t w) { return {std::vector<double>(w, 0.0), std::vector<double>(w, 1.0)}; }

    static LatentScaler fit(const Tensor& z) {
        const std::size_t n = z.rows(), w = z.cols();
        LatentScaler s = identity(w);
        if (n == 0) return s;
        for (std::size_t j = 0; j < w; ++j) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) sum += z.at(i, j);
            const double mu = sum / static_cast<double>(n);
            double var = 0.0;
            for (std::size_t i = 0; i < n; ++i) var += (z.at(i, j) - mu) * (z.at(i, j) - mu);
            var /= static_cast<double>(n);
            s.mean[j] = mu;
            s.scale[j] = var > 1e-24 ? std::sqrt(var) : 1.0;
        }
        return s;
    }

    Tensor apply(const Tensor& z) const { return transform(z, false); }
    Tensor invert(const Tensor& z) const { return transform(z, true); }

private:
    Tensor transform(const Tensor& z, bool inverse) const {
        if (z.cols() != mean.size()) throw ShapeError("latent scaler: width mismatch");
        std::vector<double> v = z.values();
        const std::size_t w = z.cols();
        for (std::size_t k = 0; k < v.size(); ++k) {
            const std::size_t j = k % w;
            v[k] = inverse ? v[k] * scale[j] + mean[j] : (v[k] - mean[j]) / scale[j];
        }
        return Tensor::from(z.shape(), std::move(v));
    }
};

struct DiffusionResult {
    DiffusionModel model;
    LatentScaler scaler;
    std::vector<double> history;  // row-weighted mean denoising loss per epoch
    std::size_t best_epoch = 0;
};

inline NoiseSchedule schedule_for(const TrainConfig& cfg) {
    NoiseSchedule s;
    s.steps = cfg.diffusion_steps;
    return s;
}

/// Minibatch denoising score matching on clean latents `mu` with labels `y`.
inline DiffusionResult train_diffusion(const Tensor& mu, const std::vector<double>& y, const TrainConfig& cfg) {
    cfg.validate();
    const std::size_t n = mu.rows(), w = mu.cols();
    if (n == 0) throw ConfigError("train_diffusion: no latent rows");
    if (y.size() != n) throw ShapeError("train_diffusion: one label per latent row required");

    Rng init_rng = stream(cfg.seed, Stream::DiffusionInit);
    Rng rng = stream(cfg.seed, Stream::DiffusionTrain);
    DiffusionResult res;
    res.model = init_diffusion(init_rng, w, schedule_for(cfg));
    res.scaler = cfg.standardize_latents ? LatentScaler::fit(mu) : LatentScaler::identity(w);
    const Tensor z0 = res.scaler.apply(mu);

    std::vector<Tensor> params = res.model.parameters();
    AdamState adam({cfg.lr}, params);
    EarlyStopping stopper(cfg.patience);
    auto best = snapshot(params);
    std::vector<std::size_t> base(n), positive;
    std::iota(base.begin(), base.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i)
        if (y[i] > 0.5) positive.push_back(i);
    const std::size_t extra =
        cfg.balance_diffusion && !positive.empty() && 2 * positive.size() < n ? n - 2 * positive.size() : 0;

    const std::size_t epochs = cfg.effective_diffusion_epochs();
    for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
        // Every row once, plus positives redrawn until the classes are even.
        std::vector<std::size_t> order = base;
        for (std::size_t k = 0; k < extra; ++k) order.push_back(positive[rng.uniform_index(0, positive.size() - 1)]);
        std::shuffle(order.begin(), order.end(), rng.engine());
        const std::size_t rows = order.size();
        double sum = 0.0;
        for (std::size_t start = 0; start < rows; start += cfg.diffusion_batch) {
            const std::size_t stop = std::min(rows, start + cfg.diffusion_batch);
            std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                         order.begin() + static_cast<std::ptrdiff_t>(stop));
            std::vector<double> yb;
            for (auto i : idx) yb.push_back(y[i]);
            Tensor loss = denoise_loss(res.model, ops::gather_rows(z0, idx), yb, rng);
            if (!std::isfinite(loss.item()))
                throw NumericError("train_diffusion: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(start / cfg.diffusion_batch));
            sum += loss.item() * static_cast<double>(idx.size());
            backward(loss);
            adam_step(adam, params);
        }
        const double epoch_loss = sum / static_cast<double>(rows);
        res.history.push_back(epoch_loss);
        if (stopper.update(epoch_loss)) {
            best = snapshot(params);
            res.best_epoch = epoch;
        }
        if (stopper.should_stop()) break;
    }
    restore(params, best);
    return res;
}

/// Everything inference needs, plus the training record.
struct GodmModel {
    TrainConfig config;
    VaeModel vae;
    DiffusionModel diffusion;
    LatentScaler latent_scaler;
    std::vector<VaeEpochLoss> vae_history;
    std::vector<double> diffusion_history;
};

inline GodmModel fit_godm(const Graph& g, const TrainConfig& cfg) {
    VaeResult vae = train_vae(g, cfg);
    DiffusionResult diff = train_diffusion(vae.mu, visible_labels(g), cfg);
    GodmModel m;
    m.config = cfg;
    m.vae = std::move(vae.model);
    m.diffusion = std::move(diff.model);
    m.latent_scaler = std::move(diff.scaler);
    m.vae_history = std::move(vae.history);
    m.diffusion_history = std::move(diff.history);
    return m;
}

}  // namespace godm
