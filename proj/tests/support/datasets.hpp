#pragma once

// Small generated datasets with a known answer, shared by the harness tests
// and the acceptance runner.

#include "edgegcn/graph_bundle.hpp"
#include "edgegcn/molecular.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

namespace datasets {

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("edgegcn_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    return dir;
}

/// Planted partition: nodes of the same class link more often and draw most
/// of their bag-of-words features from a class-specific vocabulary block.
inline edgegcn::data::GraphBundle planted_partition(std::uint64_t seed, std::size_t classes = 3,
                                                    std::size_t per_class = 40, std::size_t words_per_class = 10) {
    using namespace edgegcn::data;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GraphBundle b;
    b.num_nodes = classes * per_class;
    b.num_classes = classes;
    b.num_features = classes * words_per_class;
    b.features.assign(b.num_nodes * b.num_features, 0.0);
    for (std::size_t i = 0; i < b.num_nodes; ++i) {
        const auto y = i % classes;
        b.labels.push_back(static_cast<int>(y));
        for (int w = 0; w < 5; ++w) {
            const auto block = u(rng) < 0.7 ? y : static_cast<std::size_t>(u(rng) * classes) % classes;
            const auto word = block * words_per_class + static_cast<std::size_t>(u(rng) * words_per_class) % words_per_class;
            b.features[i * b.num_features + word] = 1.0;
        }
        const auto rank = i / classes; // position within its class
        b.split.push_back(rank < 10 ? Split::train : rank < 20 ? Split::val : Split::test);
    }
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < b.num_nodes; ++i)
        for (std::size_t j = i + 1; j < b.num_nodes; ++j)
            if (u(rng) < (i % classes == j % classes ? 0.1 : 0.01)) edges.emplace_back(i, j);
    b.edges = canonical_edges(std::move(edges), false);
    return b;
}

/// Chains whose node features are centered at +0.5 (label 1) or -0.5 (label 0).
inline edgegcn::data::MolecularSet separable_molecules(std::uint64_t seed, std::size_t count = 20) {
    using namespace edgegcn::data;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.3);
    MolecularSet set;
    for (std::size_t g = 0; g < count; ++g) {
        MolecularGraph m;
        m.label = static_cast<int>(g % 2);
        m.num_nodes = 3 + g % 4;
        m.num_features = 4;
        for (std::size_t k = 0; k < m.num_nodes * m.num_features; ++k)
            m.node_features.push_back((m.label ? 0.5 : -0.5) + noise(rng));
        std::vector<Edge> edges;
        for (std::size_t i = 0; i + 1 < m.num_nodes; ++i) edges.emplace_back(i, i + 1);
        m.edges = canonical_edges(std::move(edges), false);
        const auto slot = g % 10;
        m.split = slot < 6 ? Split::train : slot < 8 ? Split::val : Split::test;
        set.graphs.push_back(std::move(m));
    }
    return set;
}

} // namespace datasets
