#include "edgegcn/adjacency.hpp"
#include "edgegcn/errors.hpp"
#include "edgegcn/graph_bundle.hpp"
#include "edgegcn/molecular.hpp"
#include "edgegcn/scene.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>

using namespace edgegcn;
using namespace edgegcn::data;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = EDGEGCN_FIXTURES;

fs::path scratch_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("edgegcn_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    return dir;
}

// Independent re-derivation of the scene labeling rules straight from raw points.
int rederive_predicate(const SceneSample& s, std::size_t a, std::size_t b) {
    struct Box {
        double c[3] = {0, 0, 0}, lo[3], hi[3];
        int n = 0;
    } box[2];
    for (auto& bx : box) std::fill(bx.lo, bx.lo + 3, 1e300), std::fill(bx.hi, bx.hi + 3, -1e300);
    for (std::size_t k = 0; k < s.num_points(); ++k) {
        const auto id = static_cast<std::size_t>(s.instance[k] - 1);
        for (int w = 0; w < 2; ++w) {
            if (id != (w ? b : a)) continue;
            ++box[w].n;
            for (int d = 0; d < 3; ++d) {
                const double v = s.points[k * 9 + static_cast<std::size_t>(d)];
                box[w].c[d] += v;
                box[w].lo[d] = std::min(box[w].lo[d], v);
                box[w].hi[d] = std::max(box[w].hi[d], v);
            }
        }
    }
    for (auto& bx : box)
        for (double& c : bx.c) c /= bx.n;
    const double dx = box[1].c[0] - box[0].c[0], dy = box[1].c[1] - box[0].c[1];
    auto vol = [](const Box& x) { return (x.hi[0] - x.lo[0]) * (x.hi[1] - x.lo[1]) * (x.hi[2] - x.lo[2]); };
    if (box[0].lo[2] >= box[1].hi[2] && std::abs(dx) < 0.3 && std::abs(dy) < 0.3) return 1;
    if (std::sqrt(dx * dx + dy * dy) < 1.5) return 2;
    if (dx > 3.0) return 3;
    if (vol(box[0]) > 2.5 * vol(box[1])) return 4;
    return 0;
}

std::vector<double> random_binary(std::size_t m, std::mt19937_64& rng, double p) {
    std::bernoulli_distribution coin(p);
    std::vector<double> a(m * m);
    for (auto& v : a) v = coin(rng) ? 1.0 : 0.0;
    return a;
}

} // namespace

TEST(GraphBundle, LoadsHandAuthoredFixture) {
    const auto b = load_graph_bundle(kFixtures / "tiny_bundle");
    EXPECT_EQ(b.num_nodes, 3u);
    EXPECT_EQ(b.num_classes, 2u);
    EXPECT_EQ(b.num_features, 3u);
    EXPECT_EQ(b.labels, (std::vector<int>{0, 1, 1}));
    EXPECT_EQ(b.nodes_in(Split::val), (std::vector<std::size_t>{1}));
}

TEST(GraphBundle, UndirectedEdgesAreSymmetrized) {
    const auto b = load_graph_bundle(kFixtures / "tiny_bundle");
    const std::vector<Edge> expected{{0, 1}, {1, 0}, {1, 2}, {2, 1}};
    EXPECT_EQ(b.edges, expected);
}

TEST(GraphBundle, OutOfRangeEdgeNamesEdgesFile) {
    try {
        load_graph_bundle(kFixtures / "bad_edge_bundle");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_NE(e.file().find("edges.csv"), std::string::npos);
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(GraphBundle, RaggedFeatureRowIsRejectedWithLine) {
    try {
        load_graph_bundle(kFixtures / "ragged_bundle");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_NE(e.file().find("features.csv"), std::string::npos);
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(GraphBundle, MissingDirectoryIsParseError) {
    EXPECT_THROW(load_graph_bundle(kFixtures / "no_such_bundle"), ParseError);
}

TEST(GraphBundle, WriteThenLoadRoundTrips) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    GraphBundle b;
    b.num_nodes = 20;
    b.num_classes = 4;
    b.num_features = 5;
    b.directed = true;
    for (std::size_t k = 0; k < 100; ++k) b.features.push_back(u(rng) / 3.0);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < b.num_nodes; ++i) {
        b.labels.push_back(static_cast<int>(rng() % 4));
        b.split.push_back(static_cast<Split>(i % 3));
        edges.emplace_back(i, rng() % b.num_nodes);
    }
    b.edges = canonical_edges(edges, true);
    const auto dir = scratch_dir("bundle_rt");
    write_graph_bundle(b, dir);
    EXPECT_EQ(load_graph_bundle(dir), b);
    fs::remove_all(dir);
}

TEST(MolecularSet, LoadsAndRoundTrips) {
    const auto set = load_molecular_set(kFixtures / "tiny_molecules.jsonl");
    ASSERT_EQ(set.graphs.size(), 2u);
    EXPECT_EQ(set.num_features(), 2u);
    EXPECT_EQ(set.graphs[0].edges.size(), 4u); // undirected edges stored both ways
    EXPECT_EQ(set.graphs[1].label, 0);
    EXPECT_EQ(set.graphs_in(Split::test), (std::vector<std::size_t>{1}));

    const auto dir = scratch_dir("mol_rt");
    fs::create_directories(dir);
    write_molecular_set(set, dir / "set.jsonl");
    EXPECT_EQ(load_molecular_set(dir / "set.jsonl"), set);
    fs::remove_all(dir);
}

TEST(MolecularSet, BadLabelReportsLine) {
    const auto dir = scratch_dir("mol_bad");
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "bad.jsonl");
        out << R"({"node_features": [[1]], "edges": [], "label": 0, "split": "train"})" << '\n'
            << R"({"node_features": [[1]], "edges": [], "label": 3, "split": "train"})" << '\n';
    }
    try {
        load_molecular_set(dir / "bad.jsonl");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    fs::remove_all(dir);
}

TEST(Adjacency, MutualPairRowMode) {
    const auto a = normalize_adjacency({0, 1, 1, 0}, 2, NormMode::row);
    for (double v : a) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(Adjacency, PathGraphRowMode) {
    const auto a = normalize_adjacency({0, 1, 0, 1, 0, 1, 0, 1, 0}, 3, NormMode::row);
    const std::vector<double> expected{0.5, 0.5, 0, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0, 0.5, 0.5};
    for (std::size_t k = 0; k < 9; ++k) EXPECT_NEAR(a[k], expected[k], 1e-15);
}

TEST(Adjacency, IsolatedNodeKeepsSelfMass) {
    const auto a = normalize_adjacency({0, 1, 0, 1, 0, 0, 0, 0, 0}, 3, NormMode::symmetric);
    EXPECT_DOUBLE_EQ(a[8], 1.0);
    EXPECT_DOUBLE_EQ(a[6] + a[7], 0.0);
}

TEST(Adjacency, SymmetricModeMatchesDegreeFormula) {
    // path 0-1-2: degrees of A+I are 2,3,2
    const auto a = normalize_adjacency({0, 1, 0, 1, 0, 1, 0, 1, 0}, 3, NormMode::symmetric);
    EXPECT_NEAR(a[0 * 3 + 1], 1.0 / std::sqrt(6.0), 1e-15);
    EXPECT_NEAR(a[1 * 3 + 1], 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(a[2 * 3 + 2], 0.5, 1e-15);
}

TEST(Adjacency, RowSumsAreOneForRandomGraphs) {
    std::mt19937_64 rng(11);
    for (std::size_t m = 1; m <= 64; ++m) {
        for (double p : {0.0, 0.2, 0.7, 1.0}) {
            const auto a = normalize_adjacency(random_binary(m, rng, p), m, NormMode::row);
            for (std::size_t i = 0; i < m; ++i) {
                double sum = 0.0;
                for (std::size_t j = 0; j < m; ++j) sum += a[i * m + j];
                ASSERT_NEAR(sum, 1.0, 1e-12) << "m=" << m << " p=" << p << " row=" << i;
            }
        }
    }
}

TEST(Adjacency, SparseAgreesWithDense) {
    std::mt19937_64 rng(3);
    const std::size_t n = 17;
    const auto bin = random_binary(n, rng, 0.25);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (bin[i * n + j] != 0.0) edges.emplace_back(i, j);
    edges.emplace_back(0, 1); // duplicates must not inflate degree
    edges.emplace_back(0, 1);
    for (auto mode : {NormMode::row, NormMode::symmetric}) {
        auto dense_bin = bin;
        dense_bin[1] = 1.0;
        EXPECT_EQ(normalize_adjacency(n, edges, mode).to_dense(), normalize_adjacency(dense_bin, n, mode));
    }
}

TEST(Adjacency, FromSceneSinglePredicate) {
    SceneSample s;
    s.node_labels = {0, 1, 2};
    s.edge_labels[{1, 2}] = 3;
    const auto adj = adjacency_from_scene(s);
    EXPECT_EQ(std::count(adj.binary.begin(), adj.binary.end(), 1.0), 1);
    EXPECT_EQ(adj.binary[1 * 3 + 2], 1.0);
}

TEST(Adjacency, FromSceneEmptyIsIdentity) {
    SceneSample s;
    s.node_labels = {0, 1, 2, 3};
    const auto adj = adjacency_from_scene(s);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(adj.normalized[i * 4 + j], i == j ? 1.0 : 0.0);
}

TEST(Adjacency, FromSceneDensePredicatesRowsSumToOne) {
    SceneSample s;
    s.node_labels = {0, 0, 0};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (i != j) s.edge_labels[{i, j}] = 2;
    const auto adj = adjacency_from_scene(s);
    for (double v : adj.normalized) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
}

TEST(Scene, LoadsHandAuthoredFixture) {
    const auto s = load_scene(kFixtures / "tiny_scene");
    EXPECT_EQ(s.num_points(), 4u);
    EXPECT_EQ(s.num_instances(), 2u);
    EXPECT_EQ(s.predicate(0, 1), kLeftOf);
    EXPECT_EQ(s.predicate(1, 0), kNonePredicate);
    EXPECT_NO_THROW(validate_scene(s, 8, 5));
    const auto g = measure_instance(s, 0);
    EXPECT_DOUBLE_EQ(g.volume(), 1.0);
    EXPECT_DOUBLE_EQ(g.centroid[0], 0.5);
}

TEST(Scene, ValidateRejectsBrokenInvariants) {
    auto s = load_scene(kFixtures / "tiny_scene");
    auto orphan = s;
    orphan.node_labels.push_back(1); // instance 3 owns no points
    EXPECT_THROW(validate_scene(orphan, 8, 5), std::invalid_argument);
    auto diag = s;
    diag.edge_labels[{1, 1}] = 2;
    EXPECT_THROW(validate_scene(diag, 8, 5), std::invalid_argument);
    EXPECT_THROW(validate_scene(s, 8, 3), std::invalid_argument); // predicate 3 out of range
}

TEST(Scene, WriteThenLoadRoundTrips) {
    const auto s = generate_synthetic_scene({.seed = 5});
    const auto dir = scratch_dir("scene_rt");
    write_scene(s, dir / "a");
    write_scene(generate_synthetic_scene({.seed = 6}), dir / "b");
    EXPECT_EQ(load_scene(dir / "a"), s);
    const auto all = load_scene_collection(dir);
    ASSERT_EQ(all.size(), 2u);
    EXPECT_EQ(all[0], s);
    fs::remove_all(dir);
}

TEST(Synthetic, SameSeedIsIdentical) {
    for (std::uint64_t seed : {0ull, 1ull, 12345ull}) {
        EXPECT_EQ(generate_synthetic_scene({.seed = seed}), generate_synthetic_scene({.seed = seed}));
    }
    EXPECT_NE(generate_synthetic_scene({.seed = 1}), generate_synthetic_scene({.seed = 2}));
}

TEST(Synthetic, InstanceCountStaysInRange) {
    SynthOptions o;
    o.min_instances = 3;
    o.max_instances = 6;
    std::vector<int> seen(7, 0);
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        o.seed = seed;
        const auto s = generate_synthetic_scene(o);
        ASSERT_GE(s.num_instances(), 3u);
        ASSERT_LE(s.num_instances(), 6u);
        ++seen[s.num_instances()];
    }
    for (int m = 3; m <= 6; ++m) EXPECT_GT(seen[static_cast<std::size_t>(m)], 0) << m;
}

TEST(Synthetic, InvalidRangesThrow) {
    EXPECT_THROW(generate_synthetic_scene({.min_instances = 1}), std::invalid_argument);
    EXPECT_THROW(generate_synthetic_scene({.min_instances = 4, .max_instances = 33}), std::invalid_argument);
    EXPECT_THROW(generate_synthetic_scene({.min_instances = 6, .max_instances = 5}), std::invalid_argument);
}

TEST(Synthetic, LabelsAreRederivableFromPoints) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto s = generate_synthetic_scene({.seed = seed});
        ASSERT_NO_THROW(validate_scene(s, 8, 5));
        for (std::size_t i = 0; i < s.num_instances(); ++i) {
            for (std::size_t j = 0; j < s.num_instances(); ++j) {
                if (i == j) continue;
                ASSERT_EQ(s.predicate(i, j), rederive_predicate(s, i, j)) << seed << ' ' << i << ' ' << j;
            }
        }
    }
}

TEST(Synthetic, FarApartPairIsLeftOf) {
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto s = generate_synthetic_scene({.seed = seed});
        for (std::size_t i = 0; i < s.num_instances(); ++i) {
            for (std::size_t j = 0; j < s.num_instances(); ++j) {
                const auto a = measure_instance(s, i), b = measure_instance(s, j);
                if (a.centroid[0] < b.centroid[0] - kLeftOfGap && std::hypot(b.centroid[1] - a.centroid[1],
                                                                             b.centroid[0] - a.centroid[0]) >= kNearDistance) {
                    EXPECT_EQ(s.predicate(i, j), kLeftOf);
                    ++checked;
                }
            }
        }
    }
    EXPECT_GT(checked, 50u);
}

TEST(Synthetic, PredicateDensityAndCoverage) {
    std::size_t pairs = 0, labeled = 0;
    std::vector<std::size_t> per_class(5, 0);
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const auto s = generate_synthetic_scene({.seed = seed});
        const auto m = s.num_instances();
        pairs += m * (m - 1);
        labeled += s.edge_labels.size();
        for (const auto& [k, p] : s.edge_labels) ++per_class[static_cast<std::size_t>(p)];
    }
    const double ratio = static_cast<double>(labeled) / static_cast<double>(pairs);
    EXPECT_GE(ratio, 0.30);
    EXPECT_LE(ratio, 0.60);
    for (int p = 1; p < 5; ++p) EXPECT_GT(per_class[static_cast<std::size_t>(p)], 50u) << "predicate " << p;
}

TEST(Synthetic, FewerPredicateClassesDisableRules) {
    const auto s = generate_synthetic_scene({.seed = 9, .num_predicate_classes = 3});
    for (const auto& [k, p] : s.edge_labels) EXPECT_LT(p, 3);
}
