#pragma once

#include "edgegcn/adjacency.hpp"
#include "edgegcn/construction.hpp"
#include "edgegcn/edgegcn.hpp"
#include "edgegcn/heads.hpp"

#include <string>

namespace edgegcn::model {

/// Ablation grid. gcn reasons over nodes only and predicts no predicates.
enum class ModelKind { gcn, edgegcn_vanilla, edgegcn_Ae, edgegcn_Av, edgegcn_full };

const char* to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);
bool uses_edge_attention(ModelKind kind);
bool uses_node_attention(ModelKind kind);
bool predicts_edges(ModelKind kind);

struct SceneModelConfig {
    ModelKind kind = ModelKind::edgegcn_full;
    std::vector<std::size_t> backbone_hidden{64, 128}; // between the 9 input channels and C_node
    EdgeGCNConfig reasoning;                           // attention flags are derived from kind
    std::size_t num_object_classes = 8;
    std::size_t num_predicate_classes = 5;
    Reduction pooling = Reduction::max;
    data::NormMode adjacency_norm = data::NormMode::row;
};

struct SceneModel {
    SceneModelConfig config;
    BackboneParams backbone;
    EdgeGCNParams reasoning;
    HeadParams object_head;
    HeadParams predicate_head;

    static SceneModel init(SceneModelConfig config, std::mt19937_64& rng);
    std::vector<Tensor> parameters() const;
};

struct SceneOutput {
    Tensor object_logits;    // [m x C_obj]
    Tensor predicate_logits; // [m x m x C_pred], undefined for gcn
    Tensor edge_attention;
    Tensor node_attention;
};

/// Construction, reasoning and inference for one scene. The class-agnostic
/// relationship existences (A_G) come from the scene's labels.
SceneOutput scene_forward(const SceneModel& model, const data::SceneSample& scene);

} // namespace edgegcn::model
