#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace edgegcn::model {

enum class GradModule { all, edgegcn, backbone, heads };

const char* to_string(GradModule m);
GradModule parse_grad_module(const std::string& name);

struct LayerGradCheck {
    std::string layer;
    std::size_t instances = 0;
    double max_error = 0.0; // worst grad_check value over the instances
};

/// Finite-difference checks of every differentiable stage in the module, each
/// on `instances` random small scenes (2 to 4 instances, at most 40 points).
std::vector<LayerGradCheck> run_gradient_suite(GradModule module, std::size_t instances, std::uint64_t seed = 0);

} // namespace edgegcn::model
