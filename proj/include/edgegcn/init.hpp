#pragma once

#include "edgegcn/tensor.hpp"

#include <random>

namespace edgegcn {

/// Glorot/Xavier uniform weight [fan_in x fan_out], marked trainable.
Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng);

/// Zero bias of length n, marked trainable.
Tensor zero_bias(std::size_t n);

/// Uniform values in [lo, hi) with the given shape (not trainable).
Tensor uniform(Shape shape, double lo, double hi, std::mt19937_64& rng);

} // namespace edgegcn
