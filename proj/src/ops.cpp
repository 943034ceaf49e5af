#include "edgegcn/ops.hpp"

#include "edgegcn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace edgegcn {

namespace {

// Dense kernels below accumulate every output element in ascending index
// order, independent of buffer alignment, so results are bit-reproducible.

// out[m x n] += a[m x k] * b[k x n]
void gemm_nn(const double* a, const double* b, double* out, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        double* orow = out + i * n;
        const double* arow = a + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            const double* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
}

// out[k x n] += a[m x k]^T * g[m x n]
void gemm_tn(const double* a, const double* g, double* out, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        const double* grow = g + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            double* orow = out + p * n;
            for (std::size_t j = 0; j < n; ++j) orow[j] += av * grow[j];
        }
    }
}

// out[m x k] += g[m x n] * b[k x n]^T
void gemm_nt(const double* g, const double* b, double* out, std::size_t m, std::size_t k, std::size_t n) {
    std::vector<double> bt(n * k);
    for (std::size_t p = 0; p < k; ++p)
        for (std::size_t j = 0; j < n; ++j) bt[j * k + p] = b[p * n + j];
    gemm_nn(g, bt.data(), out, m, n, k);
}

void check_finite(const std::vector<double>& data, const char* op) {
    for (double v : data) {
        if (!std::isfinite(v)) throw NumericError(std::string(op) + ": non-finite value in output");
    }
}

// Wraps a computed value into a tape node wired to its inputs.
Tensor make_result(const char* op, Shape shape, std::vector<double> data, std::vector<Tensor> inputs,
                   std::function<void(detail::Node&)> backward_fn) {
    if (debug_checks()) check_finite(data, op);
    auto node = std::make_shared<detail::Node>();
    node->shape = std::move(shape);
    node->data = std::move(data);
    bool needs_grad = false;
    if (grad_enabled()) {
        for (const auto& in : inputs) needs_grad = needs_grad || in.requires_grad();
    }
    if (needs_grad) {
        node->requires_grad = true;
        node->grad.assign(node->data.size(), 0.0);
        for (const auto& in : inputs) node->parents.push_back(in.node());
        node->backward = std::move(backward_fn);
    }
    return Tensor(std::move(node));
}

bool wants(const detail::Node& self, std::size_t i) { return self.parents[i]->requires_grad; }
std::vector<double>& pgrad(detail::Node& self, std::size_t i) { return self.parents[i]->grad; }
const std::vector<double>& pdata(detail::Node& self, std::size_t i) { return self.parents[i]->data; }

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                             shape_str(b.shape()));
    }
}

} // namespace

const char* to_string(Reduction mode) {
    switch (mode) {
    case Reduction::sum: return "sum";
    case Reduction::mean: return "mean";
    case Reduction::max: return "max";
    }
    return "?";
}

Reduction parse_reduction(const std::string& name) {
    if (name == "sum") return Reduction::sum;
    if (name == "mean") return Reduction::mean;
    if (name == "max") return Reduction::max;
    throw std::invalid_argument("unknown reduction '" + name + "' (expected sum|mean|max)");
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
        throw DimensionError("matmul: cannot multiply " + shape_str(a.shape()) + " by " + shape_str(b.shape()));
    }
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    std::vector<double> out(m * n, 0.0);
    gemm_nn(a.node()->data.data(), b.node()->data.data(), out.data(), m, k, n);
    return make_result("matmul", {m, n}, std::move(out), {a, b}, [m, k, n](detail::Node& self) {
        if (wants(self, 0)) gemm_nt(self.grad.data(), pdata(self, 1).data(), pgrad(self, 0).data(), m, k, n);
        if (wants(self, 1)) gemm_tn(pdata(self, 0).data(), self.grad.data(), pgrad(self, 1).data(), m, k, n);
    });
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
    if (x.rank() == 0 || weight.rank() != 2 || x.shape().back() != weight.dim(0)) {
        throw DimensionError("linear: input " + shape_str(x.shape()) + " incompatible with weight " +
                             shape_str(weight.shape()));
    }
    const bool has_bias = bias.defined();
    const std::size_t k = weight.dim(0), n = weight.dim(1);
    if (has_bias && (bias.rank() != 1 || bias.dim(0) != n)) {
        throw DimensionError("linear: bias " + shape_str(bias.shape()) + " does not match weight " +
                             shape_str(weight.shape()));
    }
    const std::size_t rows = k ? x.numel() / k : shape_numel(Shape(x.shape().begin(), x.shape().end() - 1));
    Shape out_shape = x.shape();
    out_shape.back() = n;
    std::vector<double> out(rows * n, 0.0);
    if (has_bias) {
        const auto& bv = bias.node()->data;
        for (std::size_t r = 0; r < rows; ++r) std::copy(bv.begin(), bv.end(), out.begin() + r * n);
    }
    gemm_nn(x.node()->data.data(), weight.node()->data.data(), out.data(), rows, k, n);

    std::vector<Tensor> inputs{x, weight};
    if (has_bias) inputs.push_back(bias);
    return make_result("linear", std::move(out_shape), std::move(out), std::move(inputs),
                       [rows, k, n, has_bias](detail::Node& self) {
                           if (wants(self, 0)) {
                               gemm_nt(self.grad.data(), pdata(self, 1).data(), pgrad(self, 0).data(), rows, k, n);
                           }
                           if (wants(self, 1)) {
                               gemm_tn(pdata(self, 0).data(), self.grad.data(), pgrad(self, 1).data(), rows, k, n);
                           }
                           if (has_bias && wants(self, 2)) {
                               auto& gb = pgrad(self, 2);
                               for (std::size_t r = 0; r < rows; ++r)
                                   for (std::size_t j = 0; j < n; ++j) gb[j] += self.grad[r * n + j];
                           }
                       });
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
    return make_result("add", a.shape(), std::move(out), {a, b}, [](detail::Node& self) {
        for (std::size_t p = 0; p < 2; ++p) {
            if (!wants(self, p)) continue;
            auto& g = pgrad(self, p);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
        }
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
    return make_result("sub", a.shape(), std::move(out), {a, b}, [](detail::Node& self) {
        if (wants(self, 0)) {
            auto& g = pgrad(self, 0);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
        }
        if (wants(self, 1)) {
            auto& g = pgrad(self, 1);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
        }
    });
}

Tensor scale(const Tensor& x, double factor) {
    std::vector<double> out(x.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.data()[i] * factor;
    return make_result("scale", x.shape(), std::move(out), {x}, [factor](detail::Node& self) {
        auto& g = pgrad(self, 0);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += factor * self.grad[i];
    });
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
    if (a.shape() == b.shape()) {
        std::vector<double> out(a.numel());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
        return make_result("hadamard", a.shape(), std::move(out), {a, b}, [](detail::Node& self) {
            const auto& av = pdata(self, 0);
            const auto& bv = pdata(self, 1);
            if (wants(self, 0)) {
                auto& g = pgrad(self, 0);
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * bv[i];
            }
            if (wants(self, 1)) {
                auto& g = pgrad(self, 1);
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * av[i];
            }
        });
    }
    const bool row_mask = a.rank() == 3 && b.rank() == 2 && a.dim(0) == a.dim(1) && a.dim(0) == b.dim(0) &&
                          a.dim(2) == b.dim(1);
    if (!row_mask) {
        throw DimensionError("hadamard: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    }
    const std::size_t m = a.dim(0), c = a.dim(2);
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t ch = 0; ch < c; ++ch)
                out[(i * m + j) * c + ch] = a.data()[(i * m + j) * c + ch] * b.data()[i * c + ch];
    return make_result("hadamard", a.shape(), std::move(out), {a, b}, [m, c](detail::Node& self) {
        const auto& av = pdata(self, 0);
        const auto& bv = pdata(self, 1);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t ch = 0; ch < c; ++ch) {
                    const std::size_t idx = (i * m + j) * c + ch;
                    if (wants(self, 0)) pgrad(self, 0)[idx] += self.grad[idx] * bv[i * c + ch];
                    if (wants(self, 1)) pgrad(self, 1)[i * c + ch] += self.grad[idx] * av[idx];
                }
    });
}

Tensor relu(const Tensor& x) {
    std::vector<double> out(x.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.data()[i] > 0.0 ? x.data()[i] : 0.0;
    return make_result("relu", x.shape(), std::move(out), {x}, [](detail::Node& self) {
        const auto& xv = pdata(self, 0);
        auto& g = pgrad(self, 0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (xv[i] > 0.0) g[i] += self.grad[i];
        }
    });
}

Tensor sigmoid(const Tensor& x) {
    std::vector<double> out(x.numel());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = x.data()[i];
        // Split on sign so exp never overflows.
        out[i] = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
    }
    return make_result("sigmoid", x.shape(), std::move(out), {x}, [](detail::Node& self) {
        auto& g = pgrad(self, 0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double s = self.data[i];
            g[i] += self.grad[i] * s * (1.0 - s);
        }
    });
}

Tensor reduce(const Tensor& x, std::size_t axis, Reduction mode) {
    if (axis >= x.rank()) {
        throw DimensionError("reduce: axis " + std::to_string(axis) + " out of range for " + shape_str(x.shape()));
    }
    const auto& s = x.shape();
    std::size_t outer = 1, inner = 1;
    for (std::size_t d = 0; d < axis; ++d) outer *= s[d];
    for (std::size_t d = axis + 1; d < s.size(); ++d) inner *= s[d];
    const std::size_t n = s[axis];
    if (n == 0 && mode != Reduction::sum) {
        throw DimensionError(std::string("reduce: empty axis under ") + to_string(mode));
    }
    Shape out_shape;
    for (std::size_t d = 0; d < s.size(); ++d)
        if (d != axis) out_shape.push_back(s[d]);

    const auto& xv = x.node()->data;
    std::vector<double> out(outer * inner, 0.0);
    std::vector<std::size_t> argmax;
    if (mode == Reduction::max) argmax.assign(outer * inner, 0);
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t i = 0; i < inner; ++i) {
            const std::size_t dst = o * inner + i;
            if (mode == Reduction::max) {
                double best = xv[o * n * inner + i];
                std::size_t best_k = 0;
                for (std::size_t k = 1; k < n; ++k) {
                    const double v = xv[(o * n + k) * inner + i];
                    if (v > best) {
                        best = v;
                        best_k = k;
                    }
                }
                out[dst] = best;
                argmax[dst] = best_k;
            } else {
                double acc = 0.0;
                for (std::size_t k = 0; k < n; ++k) acc += xv[(o * n + k) * inner + i];
                out[dst] = mode == Reduction::mean ? acc / static_cast<double>(n) : acc;
            }
        }
    }
    return make_result("reduce", std::move(out_shape), std::move(out), {x},
                       [outer, inner, n, mode, argmax = std::move(argmax)](detail::Node& self) {
                           auto& g = pgrad(self, 0);
                           const double w = mode == Reduction::mean ? 1.0 / static_cast<double>(n) : 1.0;
                           for (std::size_t o = 0; o < outer; ++o) {
                               for (std::size_t i = 0; i < inner; ++i) {
                                   const double up = self.grad[o * inner + i];
                                   if (mode == Reduction::max) {
                                       g[(o * n + argmax[o * inner + i]) * inner + i] += up;
                                   } else {
                                       for (std::size_t k = 0; k < n; ++k) g[(o * n + k) * inner + i] += up * w;
                                   }
                               }
                           }
                       });
}

Tensor sum_all(const Tensor& x) {
    double acc = 0.0;
    for (double v : x.data()) acc += v;
    return make_result("sum_all", {}, {acc}, {x}, [](detail::Node& self) {
        auto& g = pgrad(self, 0);
        for (auto& v : g) v += self.grad[0];
    });
}

Tensor sum_squares(const Tensor& x) {
    double acc = 0.0;
    for (double v : x.data()) acc += v * v;
    return make_result("sum_squares", {}, {acc}, {x}, [](detail::Node& self) {
        const auto& xv = pdata(self, 0);
        auto& g = pgrad(self, 0);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += 2.0 * xv[i] * self.grad[0];
    });
}

Tensor concat_last(const Tensor& a, const Tensor& b) {
    if (a.rank() == 0 || a.rank() != b.rank() ||
        !std::equal(a.shape().begin(), a.shape().end() - 1, b.shape().begin())) {
        throw DimensionError("concat_last: leading dims differ " + shape_str(a.shape()) + " vs " +
                             shape_str(b.shape()));
    }
    const std::size_t ca = a.shape().back(), cb = b.shape().back();
    const std::size_t rows = shape_numel(Shape(a.shape().begin(), a.shape().end() - 1));
    Shape out_shape = a.shape();
    out_shape.back() = ca + cb;
    std::vector<double> out(rows * (ca + cb));
    for (std::size_t r = 0; r < rows; ++r) {
        std::copy_n(a.data().begin() + r * ca, ca, out.begin() + r * (ca + cb));
        std::copy_n(b.data().begin() + r * cb, cb, out.begin() + r * (ca + cb) + ca);
    }
    return make_result("concat_last", std::move(out_shape), std::move(out), {a, b}, [rows, ca, cb](detail::Node& self) {
        for (std::size_t r = 0; r < rows; ++r) {
            if (wants(self, 0)) {
                auto& g = pgrad(self, 0);
                for (std::size_t c = 0; c < ca; ++c) g[r * ca + c] += self.grad[r * (ca + cb) + c];
            }
            if (wants(self, 1)) {
                auto& g = pgrad(self, 1);
                for (std::size_t c = 0; c < cb; ++c) g[r * cb + c] += self.grad[r * (ca + cb) + ca + c];
            }
        }
    });
}

Tensor reshape(const Tensor& x, Shape shape) {
    if (shape_numel(shape) != x.numel()) {
        throw DimensionError("reshape: cannot view " + shape_str(x.shape()) + " as " + shape_str(shape));
    }
    return make_result("reshape", std::move(shape), x.node()->data, {x}, [](detail::Node& self) {
        auto& g = pgrad(self, 0);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    });
}

Tensor gather_rows(const Tensor& x, std::span<const std::size_t> index) {
    if (x.rank() == 0) throw DimensionError("gather_rows: scalar input");
    const std::size_t rows = x.dim(0);
    const std::size_t width = rows ? x.numel() / rows : shape_numel(Shape(x.shape().begin() + 1, x.shape().end()));
    for (auto r : index) {
        if (r >= rows) throw DimensionError("gather_rows: index " + std::to_string(r) + " >= " + std::to_string(rows));
    }
    Shape out_shape = x.shape();
    out_shape[0] = index.size();
    std::vector<double> out(index.size() * width);
    for (std::size_t k = 0; k < index.size(); ++k) {
        std::copy_n(x.data().begin() + index[k] * width, width, out.begin() + k * width);
    }
    std::vector<std::size_t> idx(index.begin(), index.end());
    return make_result("gather_rows", std::move(out_shape), std::move(out), {x},
                       [width, idx = std::move(idx)](detail::Node& self) {
                           auto& g = pgrad(self, 0);
                           for (std::size_t k = 0; k < idx.size(); ++k)
                               for (std::size_t c = 0; c < width; ++c) g[idx[k] * width + c] += self.grad[k * width + c];
                       });
}

Tensor segment_reduce(const Tensor& x, std::span<const std::size_t> segment, std::size_t num_segments,
                      Reduction mode) {
    if (x.rank() != 2 || x.dim(0) != segment.size()) {
        throw DimensionError("segment_reduce: expected [E x C] with E=" + std::to_string(segment.size()) +
                             ", got " + shape_str(x.shape()));
    }
    const std::size_t rows = x.dim(0), c = x.dim(1);
    for (auto s : segment) {
        if (s >= num_segments) throw DimensionError("segment_reduce: segment id out of range");
    }
    const auto& xv = x.node()->data;
    std::vector<double> out(num_segments * c, 0.0);
    std::vector<std::size_t> count(num_segments, 0);
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> argmax;
    if (mode == Reduction::max) argmax.assign(num_segments * c, none);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t s = segment[r];
        ++count[s];
        for (std::size_t ch = 0; ch < c; ++ch) {
            const double v = xv[r * c + ch];
            if (mode == Reduction::max) {
                auto& am = argmax[s * c + ch];
                if (am == none || v > out[s * c + ch]) {
                    am = r;
                    out[s * c + ch] = v;
                }
            } else {
                out[s * c + ch] += v;
            }
        }
    }
    if (mode == Reduction::mean) {
        for (std::size_t s = 0; s < num_segments; ++s)
            if (count[s])
                for (std::size_t ch = 0; ch < c; ++ch) out[s * c + ch] /= static_cast<double>(count[s]);
    }
    std::vector<std::size_t> seg(segment.begin(), segment.end());
    return make_result("segment_reduce", {num_segments, c}, std::move(out), {x},
                       [c, mode, seg = std::move(seg), count = std::move(count),
                        argmax = std::move(argmax)](detail::Node& self) {
                           auto& g = pgrad(self, 0);
                           if (mode == Reduction::max) {
                               for (std::size_t k = 0; k < argmax.size(); ++k)
                                   if (argmax[k] != none) g[argmax[k] * c + k % c] += self.grad[k];
                               return;
                           }
                           for (std::size_t r = 0; r < seg.size(); ++r) {
                               const std::size_t s = seg[r];
                               const double w = mode == Reduction::mean ? 1.0 / static_cast<double>(count[s]) : 1.0;
                               for (std::size_t ch = 0; ch < c; ++ch) g[r * c + ch] += w * self.grad[s * c + ch];
                           }
                       });
}

Tensor spmm(const SparseMatrix& a, const Tensor& x) {
    if (x.rank() != 2 || x.dim(0) != a.cols()) {
        throw DimensionError("spmm: sparse " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                             " incompatible with " + shape_str(x.shape()));
    }
    const std::size_t c = x.dim(1);
    const auto& xv = x.node()->data;
    std::vector<double> out(a.rows() * c, 0.0);
    const auto& rp = a.row_ptr();
    const auto& ci = a.col_index();
    const auto& val = a.values();
    for (std::size_t r = 0; r < a.rows(); ++r) {
        double* dst = out.data() + r * c;
        for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) {
            const double w = val[k];
            const double* src = xv.data() + ci[k] * c;
            for (std::size_t ch = 0; ch < c; ++ch) dst[ch] += w * src[ch];
        }
    }
    return make_result("spmm", {a.rows(), c}, std::move(out), {x}, [at = a.transpose(), c](detail::Node& self) {
        auto& g = pgrad(self, 0);
        const auto& rp = at.row_ptr();
        const auto& ci = at.col_index();
        const auto& val = at.values();
        for (std::size_t r = 0; r < at.rows(); ++r) {
            double* dst = g.data() + r * c;
            for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) {
                const double w = val[k];
                const double* src = self.grad.data() + ci[k] * c;
                for (std::size_t ch = 0; ch < c; ++ch) dst[ch] += w * src[ch];
            }
        }
    });
}

Tensor dropout(const Tensor& x, double p, std::mt19937_64& rng) {
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("dropout: p must lie in [0, 1)");
    std::vector<double> mask(x.numel());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double keep_scale = 1.0 / (1.0 - p);
    for (auto& m : mask) m = unit(rng) < p ? 0.0 : keep_scale;
    std::vector<double> out(x.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.data()[i] * mask[i];
    return make_result("dropout", x.shape(), std::move(out), {x}, [mask = std::move(mask)](detail::Node& self) {
        auto& g = pgrad(self, 0);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * mask[i];
    });
}

Tensor softmax_cross_entropy(const Tensor& logits, std::span<const int> labels, std::optional<int> ignore_label) {
    if (logits.rank() != 2 || logits.dim(0) != labels.size()) {
        throw DimensionError("softmax_cross_entropy: logits " + shape_str(logits.shape()) + " vs " +
                             std::to_string(labels.size()) + " labels");
    }
    const std::size_t b = logits.dim(0), c = logits.dim(1);
    const auto& lv = logits.node()->data;
    std::vector<double> probs(b * c, 0.0);
    std::vector<char> active(b, 0);
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < b; ++r) {
        const int y = labels[r];
        if (ignore_label && y == *ignore_label) continue;
        if (y < 0 || static_cast<std::size_t>(y) >= c) {
            throw std::out_of_range("softmax_cross_entropy: label " + std::to_string(y) + " outside [0," +
                                    std::to_string(c) + ")");
        }
        const double* row = lv.data() + r * c;
        const double mx = *std::max_element(row, row + c);
        double z = 0.0;
        for (std::size_t k = 0; k < c; ++k) z += std::exp(row[k] - mx);
        const double lse = mx + std::log(z);
        total += lse - row[y];
        for (std::size_t k = 0; k < c; ++k) probs[r * c + k] = std::exp(row[k] - lse);
        active[r] = 1;
        ++count;
    }
    if (count == 0) throw std::invalid_argument("softmax_cross_entropy: every row is ignored");
    std::vector<int> y(labels.begin(), labels.end());
    return make_result("softmax_cross_entropy", {}, {total / static_cast<double>(count)}, {logits},
                       [b, c, count, probs = std::move(probs), active = std::move(active),
                        y = std::move(y)](detail::Node& self) {
                           auto& g = pgrad(self, 0);
                           const double w = self.grad[0] / static_cast<double>(count);
                           for (std::size_t r = 0; r < b; ++r) {
                               if (!active[r]) continue;
                               for (std::size_t k = 0; k < c; ++k) g[r * c + k] += w * probs[r * c + k];
                               g[r * c + static_cast<std::size_t>(y[r])] -= w;
                           }
                       });
}

Tensor softmax_rows(const Tensor& logits) {
    if (logits.rank() != 2) throw DimensionError("softmax_rows: expected rank 2, got " + shape_str(logits.shape()));
    const std::size_t b = logits.dim(0), c = logits.dim(1);
    std::vector<double> out(b * c);
    for (std::size_t r = 0; r < b; ++r) {
        const double* row = logits.data().data() + r * c;
        const double mx = c ? *std::max_element(row, row + c) : 0.0;
        double z = 0.0;
        for (std::size_t k = 0; k < c; ++k) z += (out[r * c + k] = std::exp(row[k] - mx));
        for (std::size_t k = 0; k < c; ++k) out[r * c + k] /= z;
    }
    return Tensor::from({b, c}, std::move(out));
}

} // namespace edgegcn
