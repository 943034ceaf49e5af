#include "edgegcn/edgegcn.hpp"

#include "edgegcn/construction.hpp"
#include "edgegcn/errors.hpp"
#include "edgegcn/init.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace edgegcn::model {

namespace {

void expect(bool ok, const std::string& what) {
    if (!ok) throw DimensionError(what);
}

std::vector<std::size_t> iota_index(std::size_t begin, std::size_t end) {
    std::vector<std::size_t> idx(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    return idx;
}

} // namespace

EdgeGCNParams EdgeGCNParams::init(const EdgeGCNConfig& c, std::mt19937_64& rng) {
    EdgeGCNParams p;
    p.config = c;
    p.w_g1 = glorot_uniform(c.c_node, c.c_node_inner, rng);
    p.b_g1 = zero_bias(c.c_node_inner);
    p.w_g2 = glorot_uniform(c.c_node_inner, c.c_node, rng);
    p.b_g2 = zero_bias(c.c_node);
    p.w_phi = glorot_uniform(c.c_edge, c.c_node_inner, rng);
    p.w_pair = glorot_uniform(c.c_node, c.c_edge_inner, rng);
    p.w_theta = glorot_uniform(2 * c.c_edge_inner, c.c_edge_inner, rng);
    p.w_fc1 = glorot_uniform(c.c_edge, c.c_edge_inner, rng);
    p.b_fc1 = zero_bias(c.c_edge_inner);
    p.w_fc2 = glorot_uniform(c.c_edge_inner, c.c_edge, rng);
    p.b_fc2 = zero_bias(c.c_edge);
    return p;
}

std::vector<Tensor> EdgeGCNParams::parameters() const {
    std::vector<Tensor> out{w_g1, b_g1, w_g2, b_g2, w_fc1, b_fc1, w_fc2, b_fc2};
    if (config.use_edge_attention) out.push_back(w_phi);
    if (config.use_node_attention) {
        out.push_back(w_pair);
        out.push_back(w_theta);
    }
    return out;
}

Propagation Propagation::dense(Tensor a_hat) {
    expect(a_hat.rank() == 2 && a_hat.dim(0) == a_hat.dim(1), "Propagation: Â must be square");
    Propagation p;
    p.dense_ = std::move(a_hat);
    return p;
}

Propagation Propagation::sparse(SparseMatrix a_hat) {
    expect(a_hat.rows() == a_hat.cols(), "Propagation: Â must be square");
    Propagation p;
    p.sparse_ = std::move(a_hat);
    p.is_sparse_ = true;
    return p;
}

Tensor Propagation::apply(const Tensor& x) const { return is_sparse_ ? spmm(sparse_, x) : matmul(dense_, x); }

std::size_t Propagation::size() const { return is_sparse_ ? sparse_.rows() : dense_.dim(0); }

Tensor twinning_edge_attention(const Tensor& x_e, const Tensor& w_phi, Reduction aggregation, bool include_diagonal) {
    expect(x_e.rank() == 3 && x_e.dim(0) == x_e.dim(1), "twinning_edge_attention: X_E must be [m x m x C], got " +
                                                            shape_str(x_e.shape()));
    const auto m = x_e.dim(0);
    const auto y = linear(x_e, w_phi);
    Tensor out_agg, in_agg;
    if (include_diagonal) {
        out_agg = reduce(y, 1, aggregation); // over k in X_E(i, k)
        in_agg = reduce(y, 0, aggregation);  // over k in X_E(k, i)
    } else {
        std::vector<std::size_t> rows, src, dst;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j) continue;
                rows.push_back(i * m + j);
                src.push_back(i);
                dst.push_back(j);
            }
        }
        const auto flat = gather_rows(reshape(y, {m * m, y.dim(2)}), rows);
        out_agg = segment_reduce(flat, src, m, aggregation);
        in_agg = segment_reduce(flat, dst, m, aggregation);
    }
    return sigmoid(hadamard(out_agg, in_agg));
}

Tensor twinning_edge_attention(const Tensor& x_e, std::span<const Edge> edges, std::size_t n, const Tensor& w_phi,
                               Reduction aggregation) {
    expect(x_e.rank() == 2 && x_e.dim(0) == edges.size(),
           "twinning_edge_attention: expected one X_E row per edge, got " + shape_str(x_e.shape()));
    std::vector<std::size_t> src, dst;
    for (const auto& [s, d] : edges) {
        src.push_back(s);
        dst.push_back(d);
    }
    const auto y = linear(x_e, w_phi);
    return sigmoid(hadamard(segment_reduce(y, src, n, aggregation), segment_reduce(y, dst, n, aggregation)));
}

Tensor twinning_edge_attention_from_nodes(const Tensor& x, std::span<const Edge> edges, const Tensor& w_phi,
                                          Reduction aggregation) {
    expect(x.rank() == 2 && w_phi.rank() == 2 && w_phi.dim(0) == 2 * x.dim(1),
           "twinning_edge_attention_from_nodes: weight " + shape_str(w_phi.shape()) + " does not fit features " +
               shape_str(x.shape()));
    const auto c = x.dim(1);
    const auto n = x.dim(0);
    const auto first = iota_index(0, c);
    const auto second = iota_index(c, 2 * c);
    const auto p = linear(x, gather_rows(w_phi, first));
    const auto q = linear(x, gather_rows(w_phi, second));
    std::vector<std::size_t> src, dst;
    for (const auto& [s, d] : edges) {
        src.push_back(s);
        dst.push_back(d);
    }
    const auto y = add(gather_rows(sub(p, q), src), gather_rows(q, dst));
    return sigmoid(hadamard(segment_reduce(y, src, n, aggregation), segment_reduce(y, dst, n, aggregation)));
}

Tensor node_evolution(const Propagation& a_hat, const Tensor& x_v, const Tensor& a_e, const EdgeGCNParams& p) {
    expect(x_v.rank() == 2 && x_v.dim(0) == a_hat.size(), "node_evolution: X_V " + shape_str(x_v.shape()) +
                                                              " does not match Â of size " +
                                                              std::to_string(a_hat.size()));
    auto h = relu(linear(a_hat.apply(x_v), p.w_g1, p.b_g1));
    if (a_e.defined()) h = hadamard(h, a_e);
    return relu(linear(a_hat.apply(h), p.w_g2, p.b_g2));
}

Tensor twinning_node_attention(const Tensor& x_v, const Tensor& w_pair, const Tensor& w_theta) {
    expect(x_v.rank() == 2, "twinning_node_attention: X'_V must be [m x C]");
    const auto m = x_v.dim(0);
    const auto u = linear(x_v, w_pair);
    std::vector<std::size_t> src(m * m), dst(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            src[i * m + j] = i;
            dst[i * m + j] = j;
        }
    }
    const auto pairs = relu(concat_last(gather_rows(u, src), gather_rows(u, dst)));
    return reshape(sigmoid(linear(pairs, w_theta)), {m, m, w_theta.dim(1)});
}

Tensor edge_evolution(const Tensor& x_e, const Tensor& a_v, const EdgeGCNParams& p) {
    auto h = relu(linear(x_e, p.w_fc1, p.b_fc1));
    if (a_v.defined()) h = hadamard(h, a_v);
    return relu(linear(h, p.w_fc2, p.b_fc2));
}

EdgeGCNOutput edgegcn_forward(const SGState& in, const Propagation& a_hat, const EdgeGCNParams& p) {
    const auto& c = p.config;
    expect(in.nodes.rank() == 2 && in.nodes.dim(1) == c.c_node,
           "edgegcn_forward: X_V " + shape_str(in.nodes.shape()) + ", expected C_node " + std::to_string(c.c_node));
    const auto m = in.nodes.dim(0);
    expect(in.edges.rank() == 3 && in.edges.dim(0) == m && in.edges.dim(1) == m && in.edges.dim(2) == c.c_edge,
           "edgegcn_forward: X_E " + shape_str(in.edges.shape()) + " does not match m=" + std::to_string(m) +
               ", C_edge=" + std::to_string(c.c_edge));

    EdgeGCNOutput out;
    if (c.use_edge_attention) {
        out.edge_attention = twinning_edge_attention(in.edges, p.w_phi, c.aggregation, c.include_diagonal);
    }
    auto nodes = node_evolution(a_hat, in.nodes, out.edge_attention, p);
    if (c.use_node_attention) out.node_attention = twinning_node_attention(nodes, p.w_pair, p.w_theta);
    auto edges = edge_evolution(in.edges, out.node_attention, p);
    if (c.residual) {
        nodes = add(nodes, in.nodes);
        edges = add(edges, in.edges);
    }
    out.state = {nodes, edges};
    return out;
}

const char* to_string(EdgeSource s) { return s == EdgeSource::layer_input ? "layer_input" : "layer_output"; }

EdgeSource parse_edge_source(const std::string& name) {
    if (name == "layer_input") return EdgeSource::layer_input;
    if (name == "layer_output") return EdgeSource::layer_output;
    throw std::invalid_argument("unknown edge source '" + name + "'");
}

NodeOnlyParams NodeOnlyParams::init(const NodeOnlyConfig& c, std::mt19937_64& rng) {
    if (c.widths.size() < 2) throw std::invalid_argument("node-only model needs at least one layer");
    if (c.use_edge_attention && c.gated_layer + 1 >= c.widths.size()) {
        throw std::invalid_argument("gated layer " + std::to_string(c.gated_layer) + " does not exist");
    }
    NodeOnlyParams p;
    p.config = c;
    for (std::size_t l = 0; l + 1 < c.widths.size(); ++l) {
        p.weights.push_back(glorot_uniform(c.widths[l], c.widths[l + 1], rng));
        p.biases.push_back(zero_bias(c.widths[l + 1]));
    }
    if (c.use_edge_attention) {
        const auto src = c.edge_source == EdgeSource::layer_input ? c.widths[c.gated_layer] : c.widths[c.gated_layer + 1];
        p.w_phi = glorot_uniform(2 * src, c.widths[c.gated_layer + 1], rng);
    }
    return p;
}

std::vector<Tensor> NodeOnlyParams::parameters() const {
    std::vector<Tensor> out;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        out.push_back(weights[l]);
        out.push_back(biases[l]);
    }
    if (w_phi.defined()) out.push_back(w_phi);
    return out;
}

Tensor node_only_forward(const NodeOnlyParams& p, const Tensor& x, const SparseMatrix& a_hat,
                         std::span<const Edge> edges, std::mt19937_64* rng) {
    const auto& c = p.config;
    expect(x.rank() == 2 && x.dim(1) == c.widths.front() && x.dim(0) == a_hat.rows(),
           "node_only_forward: features " + shape_str(x.shape()) + " do not fit the model");
    Tensor h = x;
    const auto layers = p.weights.size();
    for (std::size_t l = 0; l < layers; ++l) {
        const auto input = h;
        if (rng && c.dropout > 0.0) h = dropout(h, c.dropout, *rng);
        h = linear(spmm(a_hat, h), p.weights[l], p.biases[l]);
        if (l + 1 < layers || c.relu_last) h = relu(h);
        if (c.use_edge_attention && l == c.gated_layer && !edges.empty()) {
            const auto& source = c.edge_source == EdgeSource::layer_input ? input : h;
            h = hadamard(h, twinning_edge_attention_from_nodes(source, edges, p.w_phi, c.aggregation));
        }
    }
    return h;
}

} // namespace edgegcn::model
