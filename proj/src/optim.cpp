#include "edgegcn/optim.hpp"

#include "edgegcn/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace edgegcn {

AdamState::AdamState(std::span<const Tensor> params, AdamOptions opts) : options(opts) {
    for (const auto& p : params) {
        first_moment.emplace_back(p.numel(), 0.0);
        second_moment.emplace_back(p.numel(), 0.0);
    }
}

void adam_step(std::span<Tensor> params, AdamState& state) {
    if (params.size() != state.first_moment.size()) {
        throw DimensionError("adam_step: state tracks " + std::to_string(state.first_moment.size()) +
                             " parameters, got " + std::to_string(params.size()));
    }
    for (std::size_t p = 0; p < params.size(); ++p) {
        if (!params[p].requires_grad() || params[p].grad().size() != params[p].numel()) {
            throw std::logic_error("adam_step: parameter " + std::to_string(p) + " has no gradient");
        }
        if (state.first_moment[p].size() != params[p].numel()) {
            throw DimensionError("adam_step: moment buffer shape differs from parameter " + std::to_string(p));
        }
    }
    const auto& o = state.options;
    ++state.step_count;
    const double t = static_cast<double>(state.step_count);
    const double bc1 = 1.0 - std::pow(o.beta1, t);
    const double bc2 = 1.0 - std::pow(o.beta2, t);
    for (std::size_t p = 0; p < params.size(); ++p) {
        auto value = params[p].mutable_data();
        auto grad = params[p].grad();
        auto& m = state.first_moment[p];
        auto& v = state.second_moment[p];
        for (std::size_t i = 0; i < value.size(); ++i) {
            const double g = grad[i];
            m[i] = o.beta1 * m[i] + (1.0 - o.beta1) * g;
            v[i] = o.beta2 * v[i] + (1.0 - o.beta2) * g * g;
            value[i] -= o.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + o.eps);
        }
    }
}

void zero_grad(std::span<Tensor> params) {
    for (auto& p : params) p.zero_grad();
}

} // namespace edgegcn
