#pragma once

#include "edgegcn/graph_bundle.hpp"
#include "edgegcn/scene.hpp"
#include "edgegcn/sparse.hpp"

#include <string>
#include <vector>

namespace edgegcn::data {

/// row: D^-1 (A + I).  symmetric: D^-1/2 (A + I) D^-1/2.  D is the row degree of A + I.
enum class NormMode { row, symmetric };

const char* to_string(NormMode mode);
NormMode parse_norm_mode(const std::string& name);

struct Adjacency {
    std::size_t m = 0;
    std::vector<double> binary;     // m x m, A_G without self-loops
    std::vector<double> normalized; // m x m, normalized A_G + I
    NormMode mode = NormMode::row;
};

/// Dense normalization of an m x m binary matrix. Existing diagonal ones are
/// absorbed by the added self-loop, so every diagonal entry of A + I is 1.
std::vector<double> normalize_adjacency(const std::vector<double>& binary, std::size_t m, NormMode mode);

/// Sparse counterpart for large graphs; edges are (src, dst) with src as row.
SparseMatrix normalize_adjacency(std::size_t num_nodes, const std::vector<Edge>& edges, NormMode mode);

/// A_G(i,j) = 1 iff the ordered pair carries a non-none predicate.
Adjacency adjacency_from_scene(const SceneSample& sample, NormMode mode = NormMode::row);

} // namespace edgegcn::data
