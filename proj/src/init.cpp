#include "edgegcn/init.hpp"

#include <cmath>

namespace edgegcn {

Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    auto t = uniform({fan_in, fan_out}, -limit, limit, rng);
    t.set_requires_grad(true);
    return t;
}

Tensor zero_bias(std::size_t n) { return Tensor::zeros({n}, true); }

Tensor uniform(Shape shape, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> values(shape_numel(shape));
    for (auto& v : values) v = dist(rng);
    return Tensor::from(std::move(shape), std::move(values));
}

} // namespace edgegcn
