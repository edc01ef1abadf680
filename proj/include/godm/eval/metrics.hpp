#pragma once

// Ranking metrics for binary outlier labels (1 = outlier). AUC gives tied
// positive/negative pairs half credit; AP and Recall@k order tied scores by
// input position.

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "godm/error.hpp"

namespace godm {

namespace metric_detail {

inline void check_lengths(const char* what, std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw ConfigError(std::string(what) + ": " + std::to_string(scores.size()) + " scores but " +
                          std::to_string(labels.size()) + " labels");
}

inline std::size_t count_positive(std::span<const int> labels) {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

/// Indices sorted by descending score, ties in input order.
inline std::vector<std::size_t> descending_order(std::span<const double> scores) {
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return idx;
}

}  // namespace metric_detail

inline double auc(std::span<const double> scores, std::span<const int> labels) {
    metric_detail::check_lengths("auc", scores, labels);
    const std::size_t pos = metric_detail::count_positive(labels);
    const std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0) throw ConfigError("auc: both classes must be present");
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    // Count, for each positive, negatives strictly below plus half the tied ones.
    double wins = 0.0;
    std::size_t neg_below = 0;
    for (std::size_t start = 0; start < idx.size();) {
        std::size_t stop = start;
        std::size_t tie_pos = 0, tie_neg = 0;
        while (stop < idx.size() && scores[idx[stop]] == scores[idx[start]]) {
            (labels[idx[stop]] == 1 ? tie_pos : tie_neg) += 1;
            ++stop;
        }
        wins += static_cast<double>(tie_pos) * (static_cast<double>(neg_below) + 0.5 * static_cast<double>(tie_neg));
        neg_below += tie_neg;
        start = stop;
    }
    return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

inline double average_precision(std::span<const double> scores, std::span<const int> labels) {
    metric_detail::check_lengths("average_precision", scores, labels);
    const std::size_t pos = metric_detail::count_positive(labels);
    if (pos == 0) throw ConfigError("average_precision: no positive labels");
    double sum = 0.0;
    std::size_t hits = 0, rank = 0;
    for (auto i : metric_detail::descending_order(scores)) {
        ++rank;
        if (labels[i] == 1) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(rank);
        }
    }
    return sum / static_cast<double>(pos);
}

/// Positives among the k top-scored items over all positives; k defaults to
/// the number of positives and is capped at the number of items.
inline double recall_at_k(std::span<const double> scores, std::span<const int> labels,
                          std::optional<std::size_t> k = std::nullopt) {
    metric_detail::check_lengths("recall_at_k", scores, labels);
    const std::size_t pos = metric_detail::count_positive(labels);
    if (pos == 0) throw ConfigError("recall_at_k: no positive labels");
    const std::size_t kk = k.value_or(pos);
    if (kk == 0) throw ConfigError("recall_at_k: k must be positive");
    const auto order = metric_detail::descending_order(scores);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < std::min(kk, order.size()); ++r) hits += labels[order[r]] == 1;
    return static_cast<double>(hits) / static_cast<double>(pos);
}

}  // namespace godm
