#include "edgegcn/construction.hpp"

#include "edgegcn/errors.hpp"
#include "edgegcn/init.hpp"

#include <string>

namespace edgegcn::model {

BackboneParams BackboneParams::init(std::vector<std::size_t> channels, std::mt19937_64& rng) {
    if (channels.size() < 2) throw std::invalid_argument("backbone needs at least an input and an output width");
    BackboneParams p;
    p.channels = std::move(channels);
    for (std::size_t l = 0; l + 1 < p.channels.size(); ++l) {
        p.weights.push_back(glorot_uniform(p.channels[l], p.channels[l + 1], rng));
        p.biases.push_back(zero_bias(p.channels[l + 1]));
    }
    return p;
}

std::vector<Tensor> BackboneParams::parameters() const {
    std::vector<Tensor> out;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        out.push_back(weights[l]);
        out.push_back(biases[l]);
    }
    return out;
}

Tensor backbone_forward(const Tensor& points, const BackboneParams& params) {
    if (points.rank() != 2 || points.dim(1) != params.channels.front()) {
        throw DimensionError("backbone_forward: expected [N x " + std::to_string(params.channels.front()) +
                             "] points, got " + shape_str(points.shape()));
    }
    Tensor h = points;
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        h = linear(h, params.weights[l], params.biases[l]);
        if (l + 1 < params.weights.size()) h = relu(h);
    }
    return h;
}

Tensor pool_instances(const Tensor& point_features, std::span<const int> instance, std::size_t m, Reduction mode) {
    if (point_features.rank() != 2 || point_features.dim(0) != instance.size()) {
        throw DimensionError("pool_instances: " + std::to_string(instance.size()) + " instance ids for features " +
                             shape_str(point_features.shape()));
    }
    std::vector<std::size_t> segment(instance.size());
    std::vector<std::size_t> count(m, 0);
    for (std::size_t k = 0; k < instance.size(); ++k) {
        if (instance[k] < 1 || static_cast<std::size_t>(instance[k]) > m) {
            throw std::invalid_argument("pool_instances: instance id " + std::to_string(instance[k]) +
                                        " outside [1," + std::to_string(m) + "]");
        }
        segment[k] = static_cast<std::size_t>(instance[k] - 1);
        ++count[segment[k]];
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (!count[i]) throw std::invalid_argument("pool_instances: instance " + std::to_string(i + 1) + " is empty");
    }
    return segment_reduce(point_features, segment, m, mode);
}

Tensor init_edge_features(const Tensor& node_features) {
    if (node_features.rank() != 2) throw DimensionError("init_edge_features: expected [m x C] node features");
    const auto m = node_features.dim(0);
    const auto c = node_features.dim(1);
    std::vector<std::size_t> src(m * m), dst(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            src[i * m + j] = i;
            dst[i * m + j] = j;
        }
    }
    const auto xi = gather_rows(node_features, src);
    const auto xj = gather_rows(node_features, dst);
    return reshape(concat_last(xi, sub(xj, xi)), {m, m, 2 * c});
}

Tensor init_edge_features(const Tensor& node_features, std::span<const std::pair<std::size_t, std::size_t>> edges) {
    if (node_features.rank() != 2) throw DimensionError("init_edge_features: expected [n x C] node features");
    std::vector<std::size_t> src, dst;
    src.reserve(edges.size());
    dst.reserve(edges.size());
    for (const auto& [s, d] : edges) {
        src.push_back(s);
        dst.push_back(d);
    }
    const auto xi = gather_rows(node_features, src);
    return concat_last(xi, sub(gather_rows(node_features, dst), xi));
}

Tensor scene_points(const data::SceneSample& scene) {
    return Tensor::from({scene.num_points(), data::kPointChannels}, scene.points);
}

} // namespace edgegcn::model
