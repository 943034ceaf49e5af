#include "edgegcn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace edgegcn {

double grad_check(const ScalarFunction& f, std::vector<Tensor> inputs, double eps) {
    std::vector<bool> had_grad;
    for (auto& in : inputs) {
        had_grad.push_back(in.requires_grad());
        if (!in.requires_grad()) in.set_requires_grad(true);
        in.zero_grad();
    }
    backward(f(inputs));
    std::vector<std::vector<double>> analytic;
    for (const auto& in : inputs) analytic.emplace_back(in.grad().begin(), in.grad().end());

    double worst = 0.0;
    {
        NoGradGuard no_grad;
        for (std::size_t t = 0; t < inputs.size(); ++t) {
            auto values = inputs[t].mutable_data();
            for (std::size_t i = 0; i < values.size(); ++i) {
                const double saved = values[i];
                values[i] = saved + eps;
                const double up = f(inputs).item();
                values[i] = saved - eps;
                const double down = f(inputs).item();
                values[i] = saved;
                const double fd = (up - down) / (2.0 * eps);
                const double ad = analytic[t][i];
                const double denom = std::max({1.0, std::abs(ad), std::abs(fd)});
                worst = std::max(worst, std::abs(ad - fd) / denom);
            }
        }
    }
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        inputs[t].zero_grad();
        if (!had_grad[t]) inputs[t].set_requires_grad(false);
    }
    return worst;
}

} // namespace edgegcn
