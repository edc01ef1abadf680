#pragma once

// Pairwise-enumeration references for the ranking metrics; no sorting.

#include <vector>

namespace godm::testing {

/// 1-based rank of item i: items scored higher, or tied and earlier in input order, come first.
inline std::size_t stable_rank(const std::vector<double>& s, std::size_t i) {
    std::size_t r = 1;
    for (std::size_t j = 0; j < s.size(); ++j)
        if (s[j] > s[i] || (s[j] == s[i] && j < i)) ++r;
    return r;
}

inline double brute_auc(const std::vector<double>& s, const std::vector<int>& y) {
    double wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j)
            if (y[i] == 1 && y[j] == 0) {
                pairs += 1.0;
                wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            }
    return wins / pairs;
}

inline double brute_ap(const std::vector<double>& s, const std::vector<int>& y) {
    double total = 0.0, positives = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (y[i] != 1) continue;
        positives += 1.0;
        const std::size_t r = stable_rank(s, i);
        double hits = 0.0;
        for (std::size_t j = 0; j < s.size(); ++j)
            if (y[j] == 1 && stable_rank(s, j) <= r) hits += 1.0;
        total += hits / static_cast<double>(r);
    }
    return total / positives;
}

inline double brute_recall(const std::vector<double>& s, const std::vector<int>& y, std::size_t k) {
    double hits = 0.0, positives = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (y[i] != 1) continue;
        positives += 1.0;
        if (stable_rank(s, i) <= k) hits += 1.0;
    }
    return hits / positives;
}

}  // namespace godm::testing
