#include "edgegcn/pipeline.hpp"

#include <stdexcept>

namespace edgegcn::model {

const char* to_string(ModelKind k) {
    switch (k) {
    case ModelKind::gcn: return "gcn";
    case ModelKind::edgegcn_vanilla: return "edgegcn_vanilla";
    case ModelKind::edgegcn_Ae: return "edgegcn_Ae";
    case ModelKind::edgegcn_Av: return "edgegcn_Av";
    case ModelKind::edgegcn_full: return "edgegcn_full";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& name) {
    for (auto k : {ModelKind::gcn, ModelKind::edgegcn_vanilla, ModelKind::edgegcn_Ae, ModelKind::edgegcn_Av,
                   ModelKind::edgegcn_full}) {
        if (name == to_string(k)) return k;
    }
    throw std::invalid_argument("unknown model '" + name + "'");
}

bool uses_edge_attention(ModelKind k) { return k == ModelKind::edgegcn_Ae || k == ModelKind::edgegcn_full; }
bool uses_node_attention(ModelKind k) { return k == ModelKind::edgegcn_Av || k == ModelKind::edgegcn_full; }
bool predicts_edges(ModelKind k) { return k != ModelKind::gcn; }

SceneModel SceneModel::init(SceneModelConfig config, std::mt19937_64& rng) {
    config.reasoning.use_edge_attention = uses_edge_attention(config.kind);
    config.reasoning.use_node_attention = uses_node_attention(config.kind);
    if (config.reasoning.c_edge != 2 * config.reasoning.c_node) {
        throw std::invalid_argument("edge channels must be twice the node channels under concatenation");
    }
    SceneModel m;
    m.config = config;
    std::vector<std::size_t> channels{data::kPointChannels};
    channels.insert(channels.end(), config.backbone_hidden.begin(), config.backbone_hidden.end());
    channels.push_back(config.reasoning.c_node);
    m.backbone = BackboneParams::init(channels, rng);
    m.reasoning = EdgeGCNParams::init(config.reasoning, rng);
    m.object_head = HeadParams::init(config.reasoning.c_node, config.num_object_classes, rng);
    m.predicate_head = HeadParams::init(config.reasoning.c_edge, config.num_predicate_classes, rng);
    return m;
}

std::vector<Tensor> SceneModel::parameters() const {
    auto out = backbone.parameters();
    if (predicts_edges(config.kind)) {
        for (const auto& t : reasoning.parameters()) out.push_back(t);
        for (const auto& t : predicate_head.parameters()) out.push_back(t);
    } else {
        for (const auto& t : {reasoning.w_g1, reasoning.b_g1, reasoning.w_g2, reasoning.b_g2}) out.push_back(t);
    }
    for (const auto& t : object_head.parameters()) out.push_back(t);
    return out;
}

SceneOutput scene_forward(const SceneModel& model, const data::SceneSample& scene) {
    const auto m = scene.num_instances();
    const auto points = backbone_forward(scene_points(scene), model.backbone);
    const auto nodes = pool_instances(points, scene.instance, m, model.config.pooling);
    const auto adj = data::adjacency_from_scene(scene, model.config.adjacency_norm);
    const auto a_hat = Propagation::dense(Tensor::from({m, m}, adj.normalized));

    SceneOutput out;
    if (!predicts_edges(model.config.kind)) {
        auto evolved = node_evolution(a_hat, nodes, Tensor(), model.reasoning);
        if (model.config.reasoning.residual) evolved = add(evolved, nodes);
        out.object_logits = node_head(evolved, model.object_head);
        return out;
    }
    const auto result = edgegcn_forward({nodes, init_edge_features(nodes)}, a_hat, model.reasoning);
    out.object_logits = node_head(result.state.nodes, model.object_head);
    out.predicate_logits = edge_head(result.state.edges, model.predicate_head);
    out.edge_attention = result.edge_attention;
    out.node_attention = result.node_attention;
    return out;
}

} // namespace edgegcn::model
