#pragma once

#include "edgegcn/graph_bundle.hpp"

#include <filesystem>
#include <vector>

namespace edgegcn::data {

struct MolecularGraph {
    std::size_t num_nodes = 0;
    std::size_t num_features = 0;
    std::vector<double> node_features; // num_nodes x num_features
    std::vector<Edge> edges;           // symmetric, sorted, unique
    int label = 0;                     // 0 or 1
    Split split = Split::train;

    bool operator==(const MolecularGraph&) const = default;
};

/// Whole-graph binary classification set.
///
/// Stored as JSON lines, one graph per line:
///   {"node_features": [[...], ...], "edges": [[0,1], ...], "label": 0|1, "split": "train"}
struct MolecularSet {
    std::vector<MolecularGraph> graphs;

    std::size_t num_features() const { return graphs.empty() ? 0 : graphs.front().num_features; }
    std::vector<std::size_t> graphs_in(Split s) const;

    bool operator==(const MolecularSet&) const = default;
};

MolecularSet load_molecular_set(const std::filesystem::path& path);
void write_molecular_set(const MolecularSet& set, const std::filesystem::path& path);

} // namespace edgegcn::data
