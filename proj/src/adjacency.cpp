#include "edgegcn/adjacency.hpp"

#include <cmath>
#include <stdexcept>

namespace edgegcn::data {

const char* to_string(NormMode mode) { return mode == NormMode::row ? "row" : "symmetric"; }

NormMode parse_norm_mode(const std::string& name) {
    if (name == "row") return NormMode::row;
    if (name == "symmetric") return NormMode::symmetric;
    throw std::invalid_argument("unknown adjacency normalization '" + name + "'");
}

std::vector<double> normalize_adjacency(const std::vector<double>& binary, std::size_t m, NormMode mode) {
    if (binary.size() != m * m) throw std::invalid_argument("normalize_adjacency: expected an m x m matrix");
    std::vector<double> a(m * m);
    std::vector<double> degree(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double v = i == j ? 1.0 : (binary[i * m + j] != 0.0 ? 1.0 : 0.0);
            a[i * m + j] = v;
            degree[i] += v;
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            auto& v = a[i * m + j];
            if (v == 0.0) continue;
            v = mode == NormMode::row ? v / degree[i] : v / std::sqrt(degree[i] * degree[j]);
        }
    }
    return a;
}

SparseMatrix normalize_adjacency(std::size_t n, const std::vector<Edge>& edges, NormMode mode) {
    std::vector<SparseMatrix::Entry> entries;
    entries.reserve(edges.size() + n);
    for (std::size_t i = 0; i < n; ++i) entries.push_back({i, i, 1.0});
    for (const auto& [s, d] : edges) {
        if (s >= n || d >= n) throw std::out_of_range("normalize_adjacency: edge endpoint out of range");
        if (s != d) entries.push_back({s, d, 1.0});
    }
    // Deduplicate by rebuilding through CSR, then clamp summed duplicates to 1.
    SparseMatrix raw(n, n, std::move(entries));
    std::vector<double> degree(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) degree[i] = static_cast<double>(raw.row_ptr()[i + 1] - raw.row_ptr()[i]);
    std::vector<SparseMatrix::Entry> out;
    out.reserve(raw.nnz());
    for (std::size_t i = 0; i < n; ++i) {
        for (auto k = raw.row_ptr()[i]; k < raw.row_ptr()[i + 1]; ++k) {
            const auto j = raw.col_index()[k];
            const double v = mode == NormMode::row ? 1.0 / degree[i] : 1.0 / std::sqrt(degree[i] * degree[j]);
            out.push_back({i, j, v});
        }
    }
    return SparseMatrix(n, n, std::move(out));
}

Adjacency adjacency_from_scene(const SceneSample& sample, NormMode mode) {
    Adjacency adj;
    adj.m = sample.num_instances();
    adj.mode = mode;
    adj.binary.assign(adj.m * adj.m, 0.0);
    for (const auto& [key, p] : sample.edge_labels) {
        if (p != kNonePredicate && key.first != key.second) adj.binary[key.first * adj.m + key.second] = 1.0;
    }
    adj.normalized = normalize_adjacency(adj.binary, adj.m, mode);
    return adj;
}

} // namespace edgegcn::data
