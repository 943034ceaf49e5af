#pragma once

#include "edgegcn/tensor.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace edgegcn {

struct AdamOptions {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Moment buffers for one parameter list, in the same order as the list.
struct AdamState {
    AdamOptions options;
    std::vector<std::vector<double>> first_moment;
    std::vector<std::vector<double>> second_moment;
    std::int64_t step_count = 0;

    AdamState() = default;
    AdamState(std::span<const Tensor> params, AdamOptions opts);
};

/// Bias-corrected Adam update applied in place to every parameter.
/// Throws std::logic_error when a parameter carries no gradient buffer.
void adam_step(std::span<Tensor> params, AdamState& state);

void zero_grad(std::span<Tensor> params);

} // namespace edgegcn
