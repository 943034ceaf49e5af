#include "edgegcn/metrics.hpp"

#include "edgegcn/errors.hpp"
#include "text_io.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>

namespace edgegcn::metrics {

std::vector<std::size_t> top_k(std::span<const double> row, std::size_t k) {
    std::vector<std::size_t> idx(row.size());
    std::iota(idx.begin(), idx.end(), 0);
    k = std::min(k, row.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(k), idx.end(), [&](std::size_t a, std::size_t b) {
        return row[a] != row[b] ? row[a] > row[b] : a < b;
    });
    idx.resize(k);
    return idx;
}

namespace {

void check_shape(std::span<const double> logits, std::size_t classes, std::span<const int> labels, std::size_t k) {
    if (classes == 0 || logits.size() != labels.size() * classes) {
        throw DimensionError("metric: " + std::to_string(logits.size()) + " logits for " +
                             std::to_string(labels.size()) + " rows of " + std::to_string(classes) + " classes");
    }
    if (k < 1 || k > classes) throw std::invalid_argument("metric: k must lie in [1, " + std::to_string(classes) + "]");
}

} // namespace

double recall_at_k(std::span<const double> logits, std::size_t classes, std::span<const int> labels, std::size_t k) {
    check_shape(logits, classes, labels, k);
    std::size_t hits = 0, rows = 0;
    for (std::size_t r = 0; r < labels.size(); ++r) {
        if (labels[r] == model::kIgnoreLabel) continue;
        ++rows;
        const auto top = top_k(logits.subspan(r * classes, classes), k);
        hits += std::find(top.begin(), top.end(), static_cast<std::size_t>(labels[r])) != top.end();
    }
    if (!rows) throw std::invalid_argument("recall_at_k: empty batch");
    return static_cast<double>(hits) / static_cast<double>(rows);
}

std::optional<double> macro_f1_at_k(std::span<const double> logits, std::size_t classes, std::span<const int> labels,
                                    std::size_t k, bool include_none, int none_class) {
    check_shape(logits, classes, labels, k);
    std::vector<std::size_t> tp(classes, 0), fp(classes, 0), fn(classes, 0);
    std::vector<bool> present(classes, false);
    for (std::size_t r = 0; r < labels.size(); ++r) {
        const int y = labels[r];
        if (y == model::kIgnoreLabel) continue;
        present[static_cast<std::size_t>(y)] = true;
        std::vector<bool> chosen(classes, false);
        for (auto c : top_k(logits.subspan(r * classes, classes), k)) chosen[c] = true;
        for (std::size_t c = 0; c < classes; ++c) {
            const bool is_label = static_cast<std::size_t>(y) == c;
            if (chosen[c] && is_label) ++tp[c];
            else if (chosen[c]) ++fp[c];
            else if (is_label) ++fn[c];
        }
    }
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        if (!present[c] || (!include_none && static_cast<int>(c) == none_class)) continue;
        const auto denom = 2 * tp[c] + fp[c] + fn[c];
        if (!denom) continue;
        sum += 2.0 * static_cast<double>(tp[c]) / static_cast<double>(denom);
        ++counted;
    }
    if (!counted) return std::nullopt;
    return sum / static_cast<double>(counted);
}

std::vector<model::Triplet> ground_truth_triplets(const data::SceneSample& s) {
    std::vector<model::Triplet> out;
    for (const auto& [key, p] : s.edge_labels) {
        if (p == data::kNonePredicate) continue;
        out.push_back({key.first, p, key.second, s.node_labels[key.first], s.node_labels[key.second], 1.0});
    }
    return out;
}

std::optional<double> triplet_recall(std::span<const model::Triplet> ranked, std::span<const model::Triplet> truth,
                                     std::size_t K, bool id_only) {
    if (truth.empty()) return std::nullopt;
    using Key = std::tuple<std::size_t, int, std::size_t, int, int>;
    auto key = [id_only](const model::Triplet& t) {
        return id_only ? Key{t.subject, t.predicate, t.object, 0, 0}
                       : Key{t.subject, t.predicate, t.object, t.subject_class, t.object_class};
    };
    std::set<Key> top;
    for (std::size_t r = 0; r < std::min(K, ranked.size()); ++r) top.insert(key(ranked[r]));
    std::size_t hits = 0;
    for (const auto& t : truth) hits += top.count(key(t));
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double binary_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw DimensionError("binary_auc: scores and labels differ in length");
    const auto n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double positive_rank_sum = 0.0;
    std::size_t positives = 0;
    for (std::size_t lo = 0; lo < n;) {
        auto hi = lo;
        while (hi < n && scores[order[hi]] == scores[order[lo]]) ++hi;
        const double rank = 0.5 * static_cast<double>(lo + 1 + hi); // mean of ranks lo+1 .. hi
        for (auto k = lo; k < hi; ++k) {
            const int y = labels[order[k]];
            if (y != 0 && y != 1) throw std::invalid_argument("binary_auc: labels must be 0 or 1");
            if (y == 1) {
                positive_rank_sum += rank;
                ++positives;
            }
        }
        lo = hi;
    }
    const auto negatives = n - positives;
    if (!positives || !negatives) throw std::invalid_argument("binary_auc: both classes must be present");
    const double np = static_cast<double>(positives);
    return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(negatives));
}

void write_reports_csv(const std::filesystem::path& path, const std::vector<std::map<std::string, std::string>>& rows) {
    std::vector<std::string> columns;
    std::set<std::string> seen;
    for (const auto& row : rows)
        for (const auto& [k, v] : row)
            if (seen.insert(k).second) columns.push_back(k);
    std::sort(columns.begin(), columns.end());
    auto out = io::open_out(path);
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out << ',';
            if (const auto it = row.find(columns[c]); it != row.end()) out << it->second;
        }
        out << '\n';
    }
}

} // namespace edgegcn::metrics
