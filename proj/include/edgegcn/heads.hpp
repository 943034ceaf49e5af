#pragma once

#include "edgegcn/scene.hpp"
#include "edgegcn/tensor.hpp"

#include <random>
#include <span>
#include <vector>

namespace edgegcn::model {

/// Two fully connected layers C_in -> C_in/2 -> C_out with ReLU between.
struct HeadParams {
    Tensor w1, b1, w2, b2;

    static HeadParams init(std::size_t c_in, std::size_t c_out, std::mt19937_64& rng);
    std::vector<Tensor> parameters() const { return {w1, b1, w2, b2}; }
};

/// [m x C] -> [m x num_object_classes] raw logits.
Tensor node_head(const Tensor& node_features, const HeadParams& params);
/// [m x m x C] -> [m x m x num_predicate_classes]; diagonal slots are computed but never supervised.
Tensor edge_head(const Tensor& edge_features, const HeadParams& params);

inline constexpr int kIgnoreLabel = -1;

/// Row-major m x m predicate targets: unlabeled pairs are "none", the
/// diagonal is kIgnoreLabel.
std::vector<int> dense_edge_labels(const data::SceneSample& scene);

struct JointLoss {
    Tensor total;
    Tensor node;
    Tensor edge;           // undefined when no pair is supervised
    bool edge_supervised = false;
};

/// L_node (mean over nodes) plus L_edge (mean over off-diagonal ordered
/// pairs). Pass an undefined predicate_logits for a node-only model. With
/// m < 2 there are no pairs and L_edge counts as zero.
JointLoss joint_loss(const Tensor& object_logits, const Tensor& predicate_logits, const std::vector<int>& node_labels,
                     const std::vector<int>& edge_labels);

struct Triplet {
    std::size_t subject = 0;
    int predicate = 0;
    std::size_t object = 0;
    int subject_class = 0;
    int object_class = 0;
    double confidence = 0.0;

    bool operator==(const Triplet&) const = default;
};

/// Candidates for every ordered pair whose top predicate is not "none",
/// enumerated over each non-none predicate p with confidence
/// P(subject top class) * P(p | pair) * P(object top class). Sorted by
/// descending confidence, ties by (subject, object, predicate) ascending.
/// Inputs are probabilities: [m x C_obj] and [m x m x C_pred].
std::vector<Triplet> triplet_confidences(const Tensor& object_probs, const Tensor& predicate_probs);

/// Index of the largest value, lowest index among ties.
std::size_t argmax(std::span<const double> values);

} // namespace edgegcn::model
