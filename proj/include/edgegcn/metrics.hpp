#pragma once

#include "edgegcn/heads.hpp"
#include "edgegcn/scene.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace edgegcn::metrics {

/// Indices of the k largest values, larger first, lower index winning ties.
std::vector<std::size_t> top_k(std::span<const double> row, std::size_t k);

/// Fraction of rows of logits [rows x classes] whose label is among the top
/// k classes. Rows labeled model::kIgnoreLabel are skipped. Throws on an
/// empty batch or k outside [1, classes].
double recall_at_k(std::span<const double> logits, std::size_t classes, std::span<const int> labels, std::size_t k);

/// Macro F1 over predicate classes present in the labels, where each row
/// predicts its top-k set. Ignored rows are skipped; class none_class is left
/// out unless include_none. Empty when no eligible class occurs.
std::optional<double> macro_f1_at_k(std::span<const double> logits, std::size_t classes, std::span<const int> labels,
                                    std::size_t k, bool include_none = false, int none_class = 0);

/// Ground-truth triplets of a scene, classes taken from node labels.
std::vector<model::Triplet> ground_truth_triplets(const data::SceneSample& scene);

/// Share of ground-truth triplets matched within the first K ranked ones.
/// A match needs equal subject, predicate and object, plus equal classes
/// unless id_only. Empty when there is no ground truth.
std::optional<double> triplet_recall(std::span<const model::Triplet> ranked, std::span<const model::Triplet> truth,
                                     std::size_t K, bool id_only = false);

/// Mann-Whitney AUC with tied scores counting one half. Throws unless both
/// classes occur.
double binary_auc(std::span<const double> scores, std::span<const int> labels);

/// Named metrics for one evaluation pass.
struct EvalReport {
    std::string split;
    std::size_t count = 0;
    std::map<std::string, double> values;

    bool operator==(const EvalReport&) const = default;
};

/// One CSV row per report; columns are the union of keys, blanks for gaps.
void write_reports_csv(const std::filesystem::path& path, const std::vector<std::map<std::string, std::string>>& rows);

} // namespace edgegcn::metrics
