#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace edgegcn::data {

enum class Split { train, val, test };

const char* to_string(Split s);
Split parse_split(const std::string& name);

using Edge = std::pair<std::size_t, std::size_t>;

/// Node-classification dataset.
///
/// On-disk layout (one directory):
///   meta.txt     key = value lines: num_nodes, num_classes, directed
///   features.csv N rows of C comma-separated reals
///   labels.csv   N integer class ids
///   edges.csv    "src,dst" lines, 0-based
///   splits.csv   N lines of train|val|test
struct GraphBundle {
    std::size_t num_nodes = 0;
    std::size_t num_classes = 0;
    std::size_t num_features = 0;
    bool directed = false;
    std::vector<double> features; // num_nodes x num_features, row-major
    std::vector<int> labels;
    std::vector<Edge> edges; // sorted, unique; symmetric when !directed
    std::vector<Split> split;

    std::vector<std::size_t> nodes_in(Split s) const;

    bool operator==(const GraphBundle&) const = default;
};

/// Loads and validates a bundle directory. Undirected bundles get both
/// directions of every edge. Throws ParseError naming the file and line.
GraphBundle load_graph_bundle(const std::filesystem::path& dir);

void write_graph_bundle(const GraphBundle& bundle, const std::filesystem::path& dir);

/// Sorts, deduplicates and (for undirected graphs) symmetrizes edges.
std::vector<Edge> canonical_edges(std::vector<Edge> edges, bool directed);

/// Divides each feature row by its sum (rows summing to zero are left alone).
void row_normalize_features(GraphBundle& bundle);

} // namespace edgegcn::data
