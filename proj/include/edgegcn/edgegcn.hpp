#pragma once

#include "edgegcn/graph_bundle.hpp"
#include "edgegcn/ops.hpp"
#include "edgegcn/sparse.hpp"
#include "edgegcn/tensor.hpp"

#include <optional>
#include <random>
#include <span>
#include <vector>

namespace edgegcn::model {

using data::Edge;

struct EdgeGCNConfig {
    std::size_t c_node = 256;
    std::size_t c_node_inner = 128;
    std::size_t c_edge = 512;
    std::size_t c_edge_inner = 256;
    bool use_edge_attention = true;
    bool use_node_attention = true;
    Reduction aggregation = Reduction::mean;
    /// Whether X_E(i, i) takes part in the dense row/column aggregation.
    bool include_diagonal = true;
    /// Add each stream's input back onto its output (scene graphs).
    bool residual = true;
};

/// Weights are stored [in x out]; linear() applies them on the last axis.
struct EdgeGCNParams {
    EdgeGCNConfig config;
    Tensor w_g1, b_g1, w_g2, b_g2; // node stream
    Tensor w_phi;                  // edge attention, no bias
    Tensor w_pair, w_theta;        // node attention, no bias
    Tensor w_fc1, b_fc1, w_fc2, b_fc2; // edge stream

    static EdgeGCNParams init(const EdgeGCNConfig& config, std::mt19937_64& rng);
    /// Only the tensors that influence the output under the current flags.
    std::vector<Tensor> parameters() const;
};

/// Â as either a dense [m x m] tensor or a constant sparse matrix.
class Propagation {
public:
    static Propagation dense(Tensor a_hat);
    static Propagation sparse(SparseMatrix a_hat);

    Tensor apply(const Tensor& x) const;
    std::size_t size() const;

private:
    Tensor dense_;
    SparseMatrix sparse_;
    bool is_sparse_ = false;
};

/// Dense twinning edge attention over X_E [m x m x C_edge]: A_E(i) = sigmoid(
/// Agg_k(X_E(i,k) W) * Agg_k(X_E(k,i) W)). Returns [m x C_out].
Tensor twinning_edge_attention(const Tensor& edge_features, const Tensor& w_phi, Reduction aggregation,
                               bool include_diagonal = true);

/// Sparse variant: one X_E row per edge; each node aggregates over its out-
/// and in-neighbors only, an empty neighborhood contributing zeros.
Tensor twinning_edge_attention(const Tensor& edge_features, std::span<const Edge> edges, std::size_t num_nodes,
                               const Tensor& w_phi, Reduction aggregation);

/// Same result as building per-edge X_E from node features x and calling the
/// sparse variant, without materializing the 2C-wide edge rows: the weight
/// splits into halves so that each projected edge is P(i) - Q(i) + Q(j).
Tensor twinning_edge_attention_from_nodes(const Tensor& node_features, std::span<const Edge> edges,
                                          const Tensor& w_phi, Reduction aggregation);

/// relu(Â (relu(Â X W1 + b1) * A_E) W2 + b2). An undefined edge_attention
/// means an all-ones gate.
Tensor node_evolution(const Propagation& a_hat, const Tensor& node_features, const Tensor& edge_attention,
                      const EdgeGCNParams& params);

/// A_V(i, j) = sigmoid(relu(X_i Wp ++ X_j Wp) Wt). Returns [m x m x C_out].
Tensor twinning_node_attention(const Tensor& node_features, const Tensor& w_pair, const Tensor& w_theta);

/// relu((relu(X_E W1 + b1) * A_V) W2 + b2). Undefined node_attention means ones.
Tensor edge_evolution(const Tensor& edge_features, const Tensor& node_attention, const EdgeGCNParams& params);

struct SGState {
    Tensor nodes; // [m x C_node]
    Tensor edges; // [m x m x C_edge]
};

struct EdgeGCNOutput {
    SGState state;
    Tensor edge_attention; // A_E, undefined when disabled
    Tensor node_attention; // A_V, undefined when disabled
};

EdgeGCNOutput edgegcn_forward(const SGState& input, const Propagation& a_hat, const EdgeGCNParams& params);

// --- node-only variant for conventional graphs ---------------------------

enum class EdgeSource {
    layer_input,  // X_E built from the features entering the gated layer
    layer_output, // ... or from that layer's activations before gating
};

const char* to_string(EdgeSource s);
EdgeSource parse_edge_source(const std::string& name);

/// A plain GCN stack whose designated layer output may be gated by a sparse
/// twinning edge attention.
struct NodeOnlyConfig {
    std::vector<std::size_t> widths; // input first, e.g. {F, 16, C}
    bool use_edge_attention = false;
    std::size_t gated_layer = 0;
    EdgeSource edge_source = EdgeSource::layer_input;
    Reduction aggregation = Reduction::mean;
    bool relu_last = false;
    double dropout = 0.0;
};

struct NodeOnlyParams {
    NodeOnlyConfig config;
    std::vector<Tensor> weights;
    std::vector<Tensor> biases;
    Tensor w_phi; // [2 * C_edge_source x widths[gated_layer + 1]]

    static NodeOnlyParams init(const NodeOnlyConfig& config, std::mt19937_64& rng);
    std::vector<Tensor> parameters() const;
};

/// Pass rng to enable dropout (training); nullptr runs deterministically.
/// A graph without edges skips the gate entirely, reducing to the plain stack.
Tensor node_only_forward(const NodeOnlyParams& params, const Tensor& x, const SparseMatrix& a_hat,
                         std::span<const Edge> edges, std::mt19937_64* rng = nullptr);

} // namespace edgegcn::model
