#include "edgegcn/gradient_suite.hpp"

#include "edgegcn/adjacency.hpp"
#include "edgegcn/construction.hpp"
#include "edgegcn/edgegcn.hpp"
#include "edgegcn/gradcheck.hpp"
#include "edgegcn/heads.hpp"
#include "edgegcn/init.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace edgegcn::model {

const char* to_string(GradModule m) {
    switch (m) {
    case GradModule::all: return "all";
    case GradModule::edgegcn: return "edgegcn";
    case GradModule::backbone: return "backbone";
    case GradModule::heads: return "heads";
    }
    return "?";
}

GradModule parse_grad_module(const std::string& name) {
    for (auto m : {GradModule::all, GradModule::edgegcn, GradModule::backbone, GradModule::heads})
        if (name == to_string(m)) return m;
    throw std::invalid_argument("unknown gradcheck module '" + name + "' (all, edgegcn, backbone, heads)");
}

namespace {

constexpr std::size_t kObj = 3, kPred = 3;

struct Instance {
    data::SceneSample scene;
    std::size_t m = 0;
};

Instance random_instance(std::mt19937_64& rng) {
    Instance in;
    in.m = 2 + rng() % 3;
    const std::size_t n = in.m + rng() % (41 - in.m);
    auto& s = in.scene;
    const auto points = uniform({n, 9}, -1, 1, rng);
    s.points.assign(points.data().begin(), points.data().end());
    for (std::size_t k = 0; k < n; ++k) s.instance.push_back(static_cast<int>(k < in.m ? k + 1 : rng() % in.m + 1));
    std::shuffle(s.instance.begin(), s.instance.end(), rng);
    for (std::size_t i = 0; i < in.m; ++i) s.node_labels.push_back(static_cast<int>(rng() % kObj));
    for (std::size_t i = 0; i < in.m; ++i)
        for (std::size_t j = 0; j < in.m; ++j)
            if (i != j && rng() % 2) s.edge_labels[{i, j}] = static_cast<int>(1 + rng() % (kPred - 1));
    return in;
}

EdgeGCNConfig small_config() {
    EdgeGCNConfig c;
    c.c_node = 4;
    c.c_node_inner = 2;
    c.c_edge = 8;
    c.c_edge_inner = 4;
    return c;
}

/// Reduces any output to a scalar through a fixed random weighting.
ScalarFunction probed(std::function<Tensor(const std::vector<Tensor>&)> f, std::uint64_t seed) {
    return [f = std::move(f), seed](const std::vector<Tensor>& in) {
        std::mt19937_64 rng(seed);
        const auto out = f(in);
        return sum_all(hadamard(out, uniform(out.shape(), -1, 1, rng)));
    };
}

Propagation dense_adjacency(const data::SceneSample& scene) {
    const auto adj = data::adjacency_from_scene(scene);
    return Propagation::dense(Tensor::from({adj.m, adj.m}, adj.normalized));
}

// Tensors share storage, so perturbing an input in place also perturbs any
// parameter struct holding the same tensor.
using Check = std::function<double(const Instance&, std::mt19937_64&)>;

struct Stage {
    const char* name;
    GradModule module;
    Check check;
};

std::vector<Stage> stages() {
    std::vector<Stage> s;
    s.push_back({"backbone+pooling", GradModule::backbone, [](const Instance& in, std::mt19937_64& rng) {
                     const auto bb = BackboneParams::init({9, 6, 4}, rng);
                     const auto points = scene_points(in.scene);
                     const auto& ids = in.scene.instance;
                     const auto m = in.m;
                     return grad_check(probed(
                                           [&ids, m](const std::vector<Tensor>& x) {
                                               BackboneParams q;
                                               q.channels = {9, 6, 4};
                                               q.weights = {x[1], x[3]};
                                               q.biases = {x[2], x[4]};
                                               return pool_instances(backbone_forward(x[0], q), ids, m);
                                           },
                                           rng()),
                                       {points, bb.weights[0], uniform({6}, -.5, .5, rng), bb.weights[1],
                                        uniform({4}, -.5, .5, rng)});
                 }});
    s.push_back({"edge_init", GradModule::edgegcn, [](const Instance& in, std::mt19937_64& rng) {
                     return grad_check(probed([](const std::vector<Tensor>& x) { return init_edge_features(x[0]); }, rng()),
                                       {uniform({in.m, 4}, -1, 1, rng)});
                 }});
    s.push_back({"edge_attention", GradModule::edgegcn, [](const Instance& in, std::mt19937_64& rng) {
                     return grad_check(probed(
                                           [](const std::vector<Tensor>& x) {
                                               return twinning_edge_attention(x[0], x[1], Reduction::mean);
                                           },
                                           rng()),
                                       {uniform({in.m, in.m, 8}, -1, 1, rng), uniform({8, 2}, -1, 1, rng)});
                 }});
    s.push_back({"edge_attention_sparse", GradModule::edgegcn, [](const Instance& in, std::mt19937_64& rng) {
                     std::vector<Edge> edges;
                     for (const auto& [key, p] : in.scene.edge_labels) edges.push_back(key);
                     const auto m = in.m;
                     return grad_check(probed(
                                           [edges, m](const std::vector<Tensor>& x) {
                                               return twinning_edge_attention(init_edge_features(x[0], edges), edges, m,
                                                                              x[1], Reduction::mean);
                                           },
                                           rng()),
                                       {uniform({m, 4}, -1, 1, rng), uniform({8, 2}, -1, 1, rng)});
                 }});
    s.push_back({"node_evolution", GradModule::edgegcn, [](const Instance& in, std::mt19937_64& rng) {
                     const auto p = EdgeGCNParams::init(small_config(), rng);
                     const auto a_hat = dense_adjacency(in.scene);
                     return grad_check(probed(
                                           [&](const std::vector<Tensor>& x) {
                                               auto q = p;
                                               q.w_g1 = x[2], q.b_g1 = x[3], q.w_g2 = x[4], q.b_g2 = x[5];
                                               return node_evolution(a_hat, x[0], x[1], q);
                                           },
                                           rng()),
                                       {uniform({in.m, 4}, -1, 1, rng), uniform({in.m, 2}, 0.1, 0.9, rng), p.w_g1,
                                        uniform({2}, -.5, .5, rng), p.w_g2, uniform({4}, -.5, .5, rng)});
                 }});
    s.push_back({"node_attention", GradModule::edgegcn, [](const Instance& in, std::mt19937_64& rng) {
                     const auto p = EdgeGCNParams::init(small_config(), rng);
                     return grad_check(probed(
                                           [](const std::vector<Tensor>& x) {
                                               return twinning_node_attention(x[0], x[1], x[2]);
                                           },
                                           rng()),
                                       {uniform({in.m, 4}, -1, 1, rng), p.w_pair, p.w_theta});
                 }});
    s.push_back({"edge_evolution", GradModule::edgegcn, [](const Instance& in, std::mt19937_64& rng) {
                     const auto p = EdgeGCNParams::init(small_config(), rng);
                     return grad_check(probed(
                                           [&](const std::vector<Tensor>& x) {
                                               auto q = p;
                                               q.w_fc1 = x[2], q.b_fc1 = x[3], q.w_fc2 = x[4], q.b_fc2 = x[5];
                                               return edge_evolution(x[0], x[1], q);
                                           },
                                           rng()),
                                       {uniform({in.m, in.m, 8}, -1, 1, rng), uniform({in.m, in.m, 4}, 0.1, 0.9, rng),
                                        p.w_fc1, uniform({4}, -.5, .5, rng), p.w_fc2, uniform({8}, -.5, .5, rng)});
                 }});
    s.push_back({"reasoning", GradModule::edgegcn, [](const Instance& in, std::mt19937_64& rng) {
                     auto p = EdgeGCNParams::init(small_config(), rng);
                     // Zero biases can leave a ReLU input exactly at its kink.
                     for (auto* b : {&p.b_g1, &p.b_g2, &p.b_fc1, &p.b_fc2}) *b = uniform(b->shape(), -.5, .5, rng);
                     const auto a_hat = dense_adjacency(in.scene);
                     const auto nodes = uniform({in.m, 4}, -1, 1, rng);
                     auto params = p.parameters();
                     params.insert(params.begin(), nodes);
                     return grad_check(probed(
                                           [&](const std::vector<Tensor>& x) {
                                               const auto out = edgegcn_forward({x[0], init_edge_features(x[0])}, a_hat, p);
                                               return concat_last(out.state.nodes, reshape(out.state.edges, {in.m, in.m * 8}));
                                           },
                                           rng()),
                                       params);
                 }});
    s.push_back({"object_head", GradModule::heads, [](const Instance& in, std::mt19937_64& rng) {
                     const auto h = HeadParams::init(4, kObj, rng);
                     return grad_check(probed(
                                           [](const std::vector<Tensor>& x) {
                                               return node_head(x[0], HeadParams{x[1], x[2], x[3], x[4]});
                                           },
                                           rng()),
                                       {uniform({in.m, 4}, -1, 1, rng), h.w1, uniform(h.b1.shape(), -.5, .5, rng), h.w2,
                                        uniform(h.b2.shape(), -.5, .5, rng)});
                 }});
    s.push_back({"predicate_head", GradModule::heads, [](const Instance& in, std::mt19937_64& rng) {
                     const auto h = HeadParams::init(8, kPred, rng);
                     return grad_check(probed(
                                           [](const std::vector<Tensor>& x) {
                                               return edge_head(x[0], HeadParams{x[1], x[2], x[3], x[4]});
                                           },
                                           rng()),
                                       {uniform({in.m, in.m, 8}, -1, 1, rng), h.w1, uniform(h.b1.shape(), -.5, .5, rng),
                                        h.w2, uniform(h.b2.shape(), -.5, .5, rng)});
                 }});
    s.push_back({"joint_loss", GradModule::heads, [](const Instance& in, std::mt19937_64& rng) {
                     const auto labels = dense_edge_labels(in.scene);
                     const auto& nodes = in.scene.node_labels;
                     return grad_check(
                         [&](const std::vector<Tensor>& x) { return joint_loss(x[0], x[1], nodes, labels).total; },
                         {uniform({in.m, kObj}, -2, 2, rng), uniform({in.m, in.m, kPred}, -2, 2, rng)});
                 }});
    return s;
}

} // namespace

std::vector<LayerGradCheck> run_gradient_suite(GradModule module, std::size_t instances, std::uint64_t seed) {
    std::vector<LayerGradCheck> out;
    std::mt19937_64 rng(seed);
    std::vector<Instance> pool;
    for (std::size_t k = 0; k < instances; ++k) pool.push_back(random_instance(rng));
    for (const auto& stage : stages()) {
        if (module != GradModule::all && stage.module != module) continue;
        LayerGradCheck r{stage.name, instances, 0.0};
        for (const auto& in : pool) r.max_error = std::max(r.max_error, stage.check(in, rng));
        out.push_back(r);
    }
    return out;
}

} // namespace edgegcn::model
