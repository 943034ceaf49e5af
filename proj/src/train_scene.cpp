#include "edgegcn/optim.hpp"
#include "harness_internal.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>

namespace edgegcn::harness {

using namespace detail;
namespace fs = std::filesystem;

SceneSplits load_scene_splits(const ExperimentConfig& config) {
    SceneSplits out;
    if (!config.data_path.empty()) {
        for (auto [name, dst] : {std::pair{"train", &out.train}, std::pair{"val", &out.val}, std::pair{"test", &out.test}}) {
            const auto dir = config.data_path / name;
            if (!fs::is_directory(dir)) throw std::invalid_argument("scene data needs a '" + std::string(name) + "' directory under " + config.data_path.string());
            *dst = data::load_scene_collection(dir);
            for (const auto& s : *dst) data::validate_scene(s, config.synth_object_classes, config.synth_predicate_classes);
        }
        return out;
    }
    data::SynthOptions o;
    o.min_instances = config.synth_min_instances;
    o.max_instances = config.synth_max_instances;
    o.num_object_classes = config.synth_object_classes;
    o.num_predicate_classes = config.synth_predicate_classes;
    o.points_per_instance = config.synth_points_per_instance;
    // Disjoint seed ranges keep the three splits independent of their sizes.
    for (auto [offset, count, dst] : {std::tuple{0ull, config.synth_train, &out.train},
                                      std::tuple{1ull << 32, config.synth_val, &out.val},
                                      std::tuple{2ull << 32, config.synth_test, &out.test}}) {
        for (std::size_t k = 0; k < count; ++k) {
            o.seed = config.synth_seed + offset + k;
            dst->push_back(data::generate_synthetic_scene(o));
        }
    }
    return out;
}

namespace detail {

model::SceneModelConfig scene_model_config(const ExperimentConfig& config) {
    model::SceneModelConfig c;
    c.kind = config.model;
    c.backbone_hidden = config.backbone_hidden;
    c.reasoning.c_node = config.c_node;
    c.reasoning.c_node_inner = config.resolved_c_node_inner();
    c.reasoning.c_edge = config.resolved_c_edge();
    c.reasoning.c_edge_inner = config.resolved_c_edge_inner();
    c.reasoning.aggregation = config.aggregation;
    c.reasoning.include_diagonal = config.include_diagonal;
    c.reasoning.residual = config.residual;
    c.num_object_classes = config.synth_object_classes;
    c.num_predicate_classes = config.synth_predicate_classes;
    c.pooling = config.pooling;
    c.adjacency_norm = config.adjacency_norm;
    return c;
}

namespace {

Tensor scene_loss(const model::SceneModel& m, const data::SceneSample& s) {
    const auto out = model::scene_forward(m, s);
    return model::joint_loss(out.object_logits, out.predicate_logits, s.node_labels, model::dense_edge_labels(s)).total;
}

bool usable(const data::SceneSample& s) {
    if (s.num_instances() >= 2) return true;
    std::clog << "warning: skipping scene with " << s.num_instances() << " instance(s)\n";
    return false;
}

} // namespace

metrics::EvalReport evaluate_scenes(const model::SceneModel& m, const std::vector<data::SceneSample>& scenes,
                                    const ExperimentConfig& config, const std::string& split) {
    NoGradGuard no_grad;
    const auto c_obj = m.config.num_object_classes;
    const auto c_pred = m.config.num_predicate_classes;
    std::vector<double> obj_logits, pred_logits;
    std::vector<int> obj_labels, pred_labels;
    std::vector<double> r50, r100;
    double loss = 0.0;
    std::size_t used = 0;
    for (const auto& s : scenes) {
        if (!usable(s)) continue;
        ++used;
        const auto out = model::scene_forward(m, s);
        const auto edge_labels = model::dense_edge_labels(s);
        loss += model::joint_loss(out.object_logits, out.predicate_logits, s.node_labels, edge_labels).total.item();
        obj_logits.insert(obj_logits.end(), out.object_logits.data().begin(), out.object_logits.data().end());
        obj_labels.insert(obj_labels.end(), s.node_labels.begin(), s.node_labels.end());
        if (!out.predicate_logits.defined()) continue;
        pred_logits.insert(pred_logits.end(), out.predicate_logits.data().begin(), out.predicate_logits.data().end());
        pred_labels.insert(pred_labels.end(), edge_labels.begin(), edge_labels.end());
        const auto n = s.num_instances();
        const auto pred_probs = reshape(softmax_rows(reshape(out.predicate_logits, {n * n, c_pred})), {n, n, c_pred});
        const auto ranked = model::triplet_confidences(softmax_rows(out.object_logits), pred_probs);
        const auto truth = metrics::ground_truth_triplets(s);
        if (const auto v = metrics::triplet_recall(ranked, truth, 50, config.triplet_id_only)) r50.push_back(*v);
        if (const auto v = metrics::triplet_recall(ranked, truth, 100, config.triplet_id_only)) r100.push_back(*v);
    }
    metrics::EvalReport r;
    r.split = split;
    r.count = used;
    if (!used) return r;
    r.values["loss"] = loss / static_cast<double>(used);
    for (std::size_t k : {1, 5, 10}) {
        if (k <= c_obj) r.values["node_r" + std::to_string(k)] = metrics::recall_at_k(obj_logits, c_obj, obj_labels, k);
    }
    if (!pred_logits.empty()) {
        for (std::size_t k : {1, 3, 5}) {
            if (k > c_pred) continue;
            if (const auto f1 = metrics::macro_f1_at_k(pred_logits, c_pred, pred_labels, k, config.f1_include_none)) {
                r.values["edge_f1_" + std::to_string(k)] = *f1;
            }
        }
        if (!r50.empty()) r.values["triplet_r50"] = mean_std(r50).first;
        if (!r100.empty()) r.values["triplet_r100"] = mean_std(r100).first;
    }
    return r;
}

} // namespace detail

TrainResult train_scene(const ExperimentConfig& config, const SceneSplits& scenes) {
    config.validate();
    if (scenes.train.empty() || scenes.val.empty()) throw std::invalid_argument("scene training needs train and val scenes");
    const Stopwatch clock;
    std::mt19937_64 rng(config.seed);
    const auto m = model::SceneModel::init(scene_model_config(config), rng);
    auto params = m.parameters();
    AdamState adam(params, {.lr = config.resolved_lr()});
    const double decay = config.resolved_weight_decay();

    RunRecord rec;
    rec.config = config.to_text();
    rec.task = to_string(config.task);
    rec.model = model::to_string(config.model);
    rec.seed = config.seed;

    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < scenes.train.size(); ++k)
        if (usable(scenes.train[k])) order.push_back(k);
    if (order.empty()) throw std::invalid_argument("no training scene has two or more instances");

    const auto named_params = named(m);
    auto best = snapshot(named_params);
    double best_val = INFINITY;
    for (std::size_t epoch = 1; epoch <= config.resolved_epochs(); ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double total = 0.0;
        for (auto k : order) {
            auto loss = scene_loss(m, scenes.train[k]);
            total += loss.item();
            if (decay > 0.0) {
                for (const auto& p : params) loss = add(loss, scale(sum_squares(p), 0.5 * decay));
            }
            zero_grad(params);
            backward(loss);
            adam_step(params, adam);
        }
        const double val = evaluate_scenes(m, scenes.val, config, "val").values.at("loss");
        rec.epochs.push_back({epoch, total / static_cast<double>(order.size()), val});
        if (val < best_val) {
            best_val = val;
            rec.best_epoch = epoch;
            best = snapshot(named_params);
        }
    }
    restore(named_params, best);
    rec.reports.push_back(evaluate_scenes(m, scenes.train, config, "train"));
    rec.reports.push_back(evaluate_scenes(m, scenes.val, config, "val"));
    if (!scenes.test.empty()) rec.reports.push_back(evaluate_scenes(m, scenes.test, config, "test"));
    rec.wall_clock_seconds = clock.seconds();
    return {rec, {config, {}, snapshot(named_params)}};
}

} // namespace edgegcn::harness
