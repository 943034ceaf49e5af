#pragma once

#include "edgegcn/sparse.hpp"
#include "edgegcn/tensor.hpp"

#include <optional>
#include <random>
#include <span>

namespace edgegcn {

enum class Reduction { sum, mean, max };

const char* to_string(Reduction mode);
Reduction parse_reduction(const std::string& name);

// All ops are differentiable with respect to every Tensor argument unless
// noted. Shapes must agree exactly; the only broadcast is the row mask form
// of hadamard().

/// [M x K] * [K x N].
Tensor matmul(const Tensor& a, const Tensor& b);

/// Applies weight [K x N] (and optional bias [N]) along the last axis of x,
/// so x of shape [..., K] maps to [..., N].
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias = Tensor());

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);

/// Elementwise product. Besides equal shapes, accepts x [m x m x C] with a
/// row mask [m x C]: out(i, j, c) = x(i, j, c) * mask(i, c).
Tensor hadamard(const Tensor& a, const Tensor& b);

Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);

/// Reduces one axis. Max routes the gradient to the lowest index among ties.
/// An empty axis is an error for mean/max and yields zeros for sum.
Tensor reduce(const Tensor& x, std::size_t axis, Reduction mode);
Tensor sum_all(const Tensor& x);
Tensor sum_squares(const Tensor& x);

/// Concatenation along the last axis; all leading extents must agree.
Tensor concat_last(const Tensor& a, const Tensor& b);

Tensor reshape(const Tensor& x, Shape shape);

/// out[k] = x[index[k]] over the leading axis; backward scatter-adds.
Tensor gather_rows(const Tensor& x, std::span<const std::size_t> index);

/// Groups rows of x [E x C] by segment id into [num_segments x C]. Segments
/// with no member rows produce zeros under every mode. Max ties go to the
/// earliest row.
Tensor segment_reduce(const Tensor& x, std::span<const std::size_t> segment, std::size_t num_segments,
                      Reduction mode);

/// Constant sparse matrix times dense x [cols x C].
Tensor spmm(const SparseMatrix& a, const Tensor& x);

/// Inverted dropout with drop probability p; the mask comes from rng.
Tensor dropout(const Tensor& x, double p, std::mt19937_64& rng);

/// Mean negative log-likelihood of labels under row-wise softmax of
/// logits [B x C]. Rows whose label equals ignore_label are skipped.
Tensor softmax_cross_entropy(const Tensor& logits, std::span<const int> labels,
                             std::optional<int> ignore_label = std::nullopt);

/// Row-wise softmax of a rank-2 tensor, computed off the tape.
Tensor softmax_rows(const Tensor& logits);

} // namespace edgegcn
