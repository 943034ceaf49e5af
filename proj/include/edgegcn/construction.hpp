#pragma once

#include "edgegcn/ops.hpp"
#include "edgegcn/scene.hpp"
#include "edgegcn/tensor.hpp"

#include <random>
#include <span>
#include <vector>

namespace edgegcn::model {

/// Shared per-point MLP. channels lists every width along the path, input
/// first, e.g. {9, 64, 128, 256}.
struct BackboneParams {
    std::vector<std::size_t> channels;
    std::vector<Tensor> weights;
    std::vector<Tensor> biases;

    static BackboneParams init(std::vector<std::size_t> channels, std::mt19937_64& rng);
    std::vector<Tensor> parameters() const;
    std::size_t out_channels() const { return channels.back(); }
};

/// [N x 9] -> [N x C_point], ReLU between layers (none after the last).
Tensor backbone_forward(const Tensor& points, const BackboneParams& params);

/// Channel-wise pooling of point features into one row per instance.
/// instance holds 1-based ids; an id in 1..m with no points is an error.
Tensor pool_instances(const Tensor& point_features, std::span<const int> instance, std::size_t m,
                      Reduction mode = Reduction::max);

/// X_E(i, j) = X_V(i) ++ (X_V(j) - X_V(i)), for all m^2 ordered slots.
/// Returns [m x m x 2C].
Tensor init_edge_features(const Tensor& node_features);

/// Per-edge variant for sparse graphs: one row per (src, dst) pair.
Tensor init_edge_features(const Tensor& node_features, std::span<const std::pair<std::size_t, std::size_t>> edges);

/// The scene's point array as an [N x 9] constant tensor.
Tensor scene_points(const data::SceneSample& scene);

} // namespace edgegcn::model
