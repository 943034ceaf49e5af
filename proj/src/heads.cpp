#include "edgegcn/heads.hpp"

#include "edgegcn/errors.hpp"
#include "edgegcn/init.hpp"
#include "edgegcn/ops.hpp"

#include <algorithm>
#include <iostream>
#include <tuple>

namespace edgegcn::model {

HeadParams HeadParams::init(std::size_t c_in, std::size_t c_out, std::mt19937_64& rng) {
    const auto hidden = std::max<std::size_t>(1, c_in / 2);
    return {glorot_uniform(c_in, hidden, rng), zero_bias(hidden), glorot_uniform(hidden, c_out, rng), zero_bias(c_out)};
}

namespace {

Tensor mlp(const Tensor& x, const HeadParams& p) { return linear(relu(linear(x, p.w1, p.b1)), p.w2, p.b2); }

} // namespace

Tensor node_head(const Tensor& x, const HeadParams& p) {
    if (x.rank() != 2) throw DimensionError("node_head: expected [m x C], got " + shape_str(x.shape()));
    return mlp(x, p);
}

Tensor edge_head(const Tensor& x, const HeadParams& p) {
    if (x.rank() != 3 || x.dim(0) != x.dim(1)) {
        throw DimensionError("edge_head: expected [m x m x C], got " + shape_str(x.shape()));
    }
    return mlp(x, p);
}

std::vector<int> dense_edge_labels(const data::SceneSample& s) {
    const auto m = s.num_instances();
    std::vector<int> out(m * m, data::kNonePredicate);
    for (std::size_t i = 0; i < m; ++i) out[i * m + i] = kIgnoreLabel;
    for (const auto& [key, p] : s.edge_labels) out[key.first * m + key.second] = p;
    return out;
}

JointLoss joint_loss(const Tensor& object_logits, const Tensor& predicate_logits, const std::vector<int>& node_labels,
                     const std::vector<int>& edge_labels) {
    JointLoss out;
    out.node = softmax_cross_entropy(object_logits, node_labels);
    out.total = out.node;
    if (!predicate_logits.defined()) return out;
    const auto m = object_logits.dim(0);
    if (predicate_logits.rank() != 3 || predicate_logits.dim(0) != m || predicate_logits.dim(1) != m) {
        throw DimensionError("joint_loss: predicate logits " + shape_str(predicate_logits.shape()) +
                             " do not match m=" + std::to_string(m));
    }
    if (edge_labels.size() != m * m) throw DimensionError("joint_loss: expected m*m edge labels");
    if (m < 2) {
        std::clog << "warning: scene with fewer than two instances has no supervised pairs\n";
        return out;
    }
    out.edge = softmax_cross_entropy(reshape(predicate_logits, {m * m, predicate_logits.dim(2)}), edge_labels,
                                     kIgnoreLabel);
    out.edge_supervised = true;
    out.total = add(out.node, out.edge);
    return out;
}

std::size_t argmax(std::span<const double> v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::vector<Triplet> triplet_confidences(const Tensor& object_probs, const Tensor& predicate_probs) {
    if (object_probs.rank() != 2 || predicate_probs.rank() != 3) {
        throw DimensionError("triplet_confidences: expected [m x C_obj] and [m x m x C_pred]");
    }
    const auto m = object_probs.dim(0);
    const auto c_obj = object_probs.dim(1);
    const auto c_pred = predicate_probs.dim(2);
    if (predicate_probs.dim(0) != m || predicate_probs.dim(1) != m) {
        throw DimensionError("triplet_confidences: predicate probabilities do not match m");
    }
    const auto obj = object_probs.data();
    const auto pred = predicate_probs.data();
    std::vector<int> top(m);
    std::vector<double> top_p(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto row = obj.subspan(i * c_obj, c_obj);
        top[i] = static_cast<int>(argmax(row));
        top_p[i] = row[static_cast<std::size_t>(top[i])];
    }
    std::vector<Triplet> out;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            const auto row = pred.subspan((i * m + j) * c_pred, c_pred);
            if (argmax(row) == static_cast<std::size_t>(data::kNonePredicate)) continue;
            for (std::size_t p = 0; p < c_pred; ++p) {
                if (static_cast<int>(p) == data::kNonePredicate) continue;
                out.push_back({i, static_cast<int>(p), j, top[i], top[j], top_p[i] * row[p] * top_p[j]});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Triplet& a, const Triplet& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        return std::tie(a.subject, a.object, a.predicate) < std::tie(b.subject, b.object, b.predicate);
    });
    return out;
}

} // namespace edgegcn::model
