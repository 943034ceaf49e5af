#pragma once

// Brute-force metric definitions, written from the definitions alone.

#include "edgegcn/heads.hpp"

#include <optional>
#include <random>
#include <vector>

namespace oracle {

/// True when label y would be among the top k of row (ties to lower index).
inline bool in_top_k(const std::vector<double>& row, std::size_t y, std::size_t k) {
    std::size_t ahead = 0;
    for (std::size_t c = 0; c < row.size(); ++c)
        if (row[c] > row[y] || (row[c] == row[y] && c < y)) ++ahead;
    return ahead < k;
}

inline std::vector<double> row_of(const std::vector<double>& logits, std::size_t r, std::size_t classes) {
    return {logits.begin() + static_cast<long>(r * classes), logits.begin() + static_cast<long>((r + 1) * classes)};
}

inline double recall(const std::vector<double>& logits, std::size_t classes, const std::vector<int>& labels,
                     std::size_t k) {
    double hit = 0, n = 0;
    for (std::size_t r = 0; r < labels.size(); ++r) {
        if (labels[r] < 0) continue;
        n += 1;
        hit += in_top_k(row_of(logits, r, classes), static_cast<std::size_t>(labels[r]), k);
    }
    return hit / n;
}

inline std::optional<double> macro_f1(const std::vector<double>& logits, std::size_t classes,
                                      const std::vector<int>& labels, std::size_t k, bool include_none) {
    double total = 0;
    int n = 0;
    for (std::size_t c = include_none ? 0 : 1; c < classes; ++c) {
        bool present = false;
        double tp = 0, fp = 0, fn = 0;
        for (std::size_t r = 0; r < labels.size(); ++r) {
            if (labels[r] < 0) continue;
            const bool predicted = in_top_k(row_of(logits, r, classes), c, k);
            const bool actual = labels[r] == static_cast<int>(c);
            present |= actual;
            tp += predicted && actual;
            fp += predicted && !actual;
            fn += !predicted && actual;
        }
        if (!present) continue;
        total += 2 * tp / (2 * tp + fp + fn);
        ++n;
    }
    if (!n) return std::nullopt;
    return total / n;
}

inline std::optional<double> triplet_recall(const std::vector<edgegcn::model::Triplet>& ranked,
                                            const std::vector<edgegcn::model::Triplet>& truth, std::size_t K,
                                            bool id_only) {
    if (truth.empty()) return std::nullopt;
    double hit = 0;
    for (const auto& g : truth) {
        for (std::size_t r = 0; r < ranked.size() && r < K; ++r) {
            const auto& t = ranked[r];
            if (t.subject == g.subject && t.object == g.object && t.predicate == g.predicate &&
                (id_only || (t.subject_class == g.subject_class && t.object_class == g.object_class))) {
                hit += 1;
                break;
            }
        }
    }
    return hit / static_cast<double>(truth.size());
}

inline double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0, pairs = 0;
    for (std::size_t a = 0; a < scores.size(); ++a)
        for (std::size_t b = 0; b < scores.size(); ++b) {
            if (labels[a] != 1 || labels[b] != 0) continue;
            pairs += 1;
            wins += scores[a] > scores[b] ? 1.0 : scores[a] == scores[b] ? 0.5 : 0.0;
        }
    return wins / pairs;
}

/// Small integer-valued logits so ties are common.
inline std::vector<double> tied_logits(std::size_t n, std::mt19937_64& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = static_cast<double>(rng() % 4);
    return v;
}

} // namespace oracle
