#pragma once

#include "edgegcn/tensor.hpp"

#include <functional>
#include <vector>

namespace edgegcn {

using ScalarFunction = std::function<Tensor(const std::vector<Tensor>&)>;

/// Compares reverse-mode gradients of f at the given inputs with central
/// finite differences. Returns the maximum over all input coordinates of
/// |g_ad - g_fd| / max(1, |g_ad|, |g_fd|). Inputs are marked
/// requires_grad for the duration; their values are restored afterwards.
double grad_check(const ScalarFunction& f, std::vector<Tensor> inputs, double eps = 1e-5);

} // namespace edgegcn
