#include "edgegcn/errors.hpp"
#include "edgegcn/optim.hpp"
#include "harness_internal.hpp"

namespace edgegcn::harness {

using namespace detail;

data::GraphBundle load_citation_data(const ExperimentConfig& config) {
    auto bundle = data::load_graph_bundle(config.data_path);
    if (config.normalize_features) data::row_normalize_features(bundle);
    return bundle;
}

namespace detail {

CitationData prepare_citation(const ExperimentConfig& config, const data::GraphBundle& b) {
    CitationData d;
    d.features = Tensor::from({b.num_nodes, b.num_features}, b.features);
    d.a_hat = data::normalize_adjacency(b.num_nodes, b.edges, config.adjacency_norm);
    for (const auto& e : b.edges)
        if (e.first != e.second) d.edges.push_back(e);
    d.bundle = &b;
    return d;
}

model::NodeOnlyParams make_citation_net(const ExperimentConfig& config, std::size_t features, std::size_t classes,
                                        std::mt19937_64& rng) {
    model::NodeOnlyConfig c;
    c.widths = {features, config.resolved_hidden(), classes};
    c.use_edge_attention = config.model == model::ModelKind::edgegcn_Ae;
    c.gated_layer = 0;
    c.edge_source = config.edge_source;
    c.aggregation = config.aggregation;
    c.dropout = config.resolved_dropout();
    return model::NodeOnlyParams::init(c, rng);
}

namespace {

std::vector<int> masked_labels(const data::GraphBundle& b, data::Split split) {
    std::vector<int> out(b.num_nodes, model::kIgnoreLabel);
    for (std::size_t i = 0; i < b.num_nodes; ++i)
        if (b.split[i] == split) out[i] = b.labels[i];
    return out;
}

} // namespace

metrics::EvalReport evaluate_citation(const model::NodeOnlyParams& net, const CitationData& d, data::Split split) {
    NoGradGuard no_grad;
    const auto logits = model::node_only_forward(net, d.features, d.a_hat, d.edges);
    const auto labels = masked_labels(*d.bundle, split);
    metrics::EvalReport r;
    r.split = data::to_string(split);
    r.count = d.bundle->nodes_in(split).size();
    r.values["accuracy"] = metrics::recall_at_k(logits.data(), logits.dim(1), labels, 1);
    r.values["loss"] = softmax_cross_entropy(logits, labels, model::kIgnoreLabel).item();
    return r;
}

} // namespace detail

TrainResult train_citation(const ExperimentConfig& config, const data::GraphBundle& bundle) {
    config.validate();
    for (auto s : {data::Split::train, data::Split::val, data::Split::test}) {
        if (bundle.nodes_in(s).empty()) {
            throw std::invalid_argument(std::string("citation bundle has no ") + data::to_string(s) + " nodes");
        }
    }
    const Stopwatch clock;
    std::mt19937_64 rng(config.seed);
    const auto d = prepare_citation(config, bundle);
    const auto net = make_citation_net(config, bundle.num_features, bundle.num_classes, rng);
    auto params = net.parameters();
    AdamState adam(params, {.lr = config.resolved_lr()});
    const auto train_labels = masked_labels(bundle, data::Split::train);
    const double decay = config.resolved_weight_decay();

    RunRecord rec;
    rec.config = config.to_text();
    rec.task = to_string(config.task);
    rec.model = model::to_string(config.model);
    rec.seed = config.seed;

    const auto named_params = named(net, "");
    auto best = snapshot(named_params);
    double best_acc = -1.0, best_loss = INFINITY;
    for (std::size_t epoch = 1; epoch <= config.resolved_epochs(); ++epoch) {
        const auto logits = model::node_only_forward(net, d.features, d.a_hat, d.edges, &rng);
        auto loss = softmax_cross_entropy(logits, train_labels, model::kIgnoreLabel);
        // L2 penalty on the first layer, as in the standard GCN recipe.
        if (decay > 0.0) loss = add(loss, scale(sum_squares(net.weights[0]), 0.5 * decay));
        zero_grad(params);
        backward(loss);
        adam_step(params, adam);

        const auto val = evaluate_citation(net, d, data::Split::val);
        const double acc = val.values.at("accuracy"), vloss = val.values.at("loss");
        rec.epochs.push_back({epoch, loss.item(), acc});
        if (acc > best_acc || (acc == best_acc && vloss < best_loss)) {
            best_acc = acc;
            best_loss = vloss;
            rec.best_epoch = epoch;
            best = snapshot(named_params);
        }
    }
    restore(named_params, best);
    for (auto s : {data::Split::train, data::Split::val, data::Split::test}) rec.reports.push_back(evaluate_citation(net, d, s));
    rec.wall_clock_seconds = clock.seconds();
    return {rec, {config, {{"num_features", bundle.num_features}, {"num_classes", bundle.num_classes}}, snapshot(named_params)}};
}

} // namespace edgegcn::harness
