#pragma once

// Downstream node outlier detector: two GraphSAGE layers over the raw
// features and a linear scoring head with bias, trained with binary
// cross-entropy on train-mask nodes.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "godm/eval/metrics.hpp"
#include "godm/graph/partition.hpp"
#include "godm/model/encoder.hpp"
#include "godm/numerics/adam.hpp"

namespace godm {

struct DetectorConfig {
    std::size_t hidden = 32;
    std::size_t epochs = 100;
    double lr = 0.01;
    std::uint64_t seed = 0;

    void validate() const {
        if (hidden < 1) throw ConfigError("detector: hidden width must be >= 1");
        if (epochs < 1) throw ConfigError("detector: epochs must be >= 1");
        if (!(lr > 0.0)) throw ConfigError("detector: lr must be positive");
    }
};

struct DetectorParams {
    SageLayer layer1;
    SageLayer layer2;
    Tensor head;       // 1 × hidden
    Tensor head_bias;  // 1 × 1

    std::vector<Tensor> parameters() const { return {layer1.weight, layer2.weight, head, head_bias}; }
};

inline DetectorParams init_detector(Rng& rng, std::size_t d, std::size_t hidden) {
    DetectorParams p;
    p.layer1 = init_sage_layer(rng, d, hidden, 0, false, "detector.layer1");
    p.layer2 = init_sage_layer(rng, hidden, hidden, 0, false, "detector.layer2");
    p.head = glorot(rng, 1, hidden, "detector.head");
    p.head_bias = zero_parameter(1, 1, "detector.head_bias");
    return p;
}

/// Structure-only view of a graph for the detector; labels do not enter.
inline Subgraph detector_view(const Graph& g) {
    Graph plain = g;
    plain.num_types = 0;
    plain.edge_type.clear();
    plain.timed = false;
    plain.edge_time.clear();
    return whole_graph(plain, std::vector<double>(g.n, 0.0));
}

/// Outlier probability for every node, one column.
inline Tensor detector_forward(const DetectorParams& p, const Subgraph& view) {
    Tensor h = Tensor::from({view.size(), view.d}, view.features);
    h = apply_layer(h, view, p.layer1, Activation::Relu, "detector.layer1");
    h = apply_layer(h, view, p.layer2, Activation::Relu, "detector.layer2");
    return ops::sigmoid(ops::add_row(ops::linear(h, p.head), p.head_bias));
}

inline std::vector<double> detector_scores(const DetectorParams& p, const Subgraph& view) {
    NoGradGuard no_grad;
    return detector_forward(p, view).values();
}

inline std::vector<double> detector_scores(const DetectorParams& p, const Graph& g) {
    return detector_scores(p, detector_view(g));
}

struct MaskedLabels {
    std::vector<std::size_t> index;
    std::vector<int> labels;
    bool both_classes() const {
        const auto pos = std::count(labels.begin(), labels.end(), 1);
        return pos > 0 && static_cast<std::size_t>(pos) < labels.size();
    }
};

inline MaskedLabels masked_labels(const Graph& g, Split s) {
    MaskedLabels out;
    for (std::size_t i = 0; i < g.n; ++i)
        if (g.split[i] == s) {
            out.index.push_back(i);
            out.labels.push_back(g.labels[i] == kOutlier ? 1 : 0);
        }
    return out;
}

inline std::vector<double> select(const std::vector<double>& v, const std::vector<std::size_t>& index) {
    std::vector<double> out;
    out.reserve(index.size());
    for (auto i : index) out.push_back(v[i]);
    return out;
}

struct DetectorResult {
    DetectorParams params;
    std::vector<double> loss_history;
    std::size_t best_epoch = 0;
    double best_val_auc = 0.0;
};

/// Fixed-epoch full-batch training; keeps the parameters of the epoch with the
/// highest validation AUC (or the last epoch if validation has a single class).
inline DetectorResult train_detector(const Graph& g, const DetectorConfig& cfg) {
    cfg.validate();
    const MaskedLabels train = masked_labels(g, Split::Train);
    if (!train.both_classes()) throw ConfigError("train_detector: training split must contain both classes");
    const MaskedLabels val = masked_labels(g, Split::Val);
    const bool use_val = val.both_classes();

    Rng rng(cfg.seed);
    DetectorResult res;
    res.params = init_detector(rng, g.d, cfg.hidden);
    std::vector<Tensor> params = res.params.parameters();
    AdamState adam({cfg.lr}, params);
    const Subgraph view = detector_view(g);
    std::vector<double> target(train.labels.begin(), train.labels.end());
    std::vector<std::vector<double>> best;
    double best_auc = -1.0;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const Tensor prob = detector_forward(res.params, view);
        Tensor loss = ops::binary_cross_entropy(ops::gather_rows(prob, train.index), target);
        if (!std::isfinite(loss.item()))
            throw NumericError("train_detector: non-finite loss at epoch " + std::to_string(epoch));
        res.loss_history.push_back(loss.item());
        backward(loss);
        adam_step(adam, params);
        if (use_val) {
            const double a = auc(select(detector_scores(res.params, view), val.index), val.labels);
            if (a > best_auc) {
                best_auc = a;
                res.best_epoch = epoch;
                best.clear();
                for (const auto& p : params) best.push_back(p.values());
            }
        }
    }
    if (use_val) {
        for (std::size_t k = 0; k < params.size(); ++k) {
            auto dst = params[k].mutable_data();
            std::copy(best[k].begin(), best[k].end(), dst.begin());
        }
        res.best_val_auc = best_auc;
    } else {
        res.best_epoch = cfg.epochs;
    }
    return res;
}

}  // namespace godm
