#include "edgegcn/init.hpp"
#include "edgegcn/optim.hpp"
#include "harness_internal.hpp"

#include <algorithm>
#include <numeric>

namespace edgegcn::harness {

using namespace detail;

namespace detail {

NamedTensors MolecularNet::named() const {
    auto out = detail::named(net, "gcn.");
    out.emplace_back("readout.weight", w_out);
    out.emplace_back("readout.bias", b_out);
    return out;
}

std::vector<Tensor> MolecularNet::parameters() const {
    auto out = net.parameters();
    out.push_back(w_out);
    out.push_back(b_out);
    return out;
}

std::vector<PreparedGraph> prepare_molecular(const ExperimentConfig& config, const data::MolecularSet& set) {
    std::vector<PreparedGraph> out;
    for (const auto& g : set.graphs) {
        PreparedGraph p;
        p.features = Tensor::from({g.num_nodes, g.num_features}, g.node_features);
        p.a_hat = data::normalize_adjacency(g.num_nodes, g.edges, config.adjacency_norm);
        for (const auto& e : g.edges)
            if (e.first != e.second) p.edges.push_back(e);
        p.label = g.label;
        out.push_back(std::move(p));
    }
    return out;
}

MolecularNet make_molecular_net(const ExperimentConfig& config, std::size_t features, std::mt19937_64& rng) {
    model::NodeOnlyConfig c;
    const auto h = config.resolved_hidden();
    c.widths = {features, h, h, h};
    c.use_edge_attention = config.model == model::ModelKind::edgegcn_Ae;
    c.gated_layer = 1;
    c.edge_source = config.edge_source;
    c.aggregation = config.aggregation;
    c.relu_last = true;
    c.dropout = config.resolved_dropout();
    MolecularNet m;
    m.net = model::NodeOnlyParams::init(c, rng);
    m.w_out = glorot_uniform(h, 1, rng);
    m.b_out = zero_bias(1);
    return m;
}

Tensor molecular_score(const MolecularNet& m, const PreparedGraph& g, std::mt19937_64* rng) {
    const auto h = model::node_only_forward(m.net, g.features, g.a_hat, g.edges, rng);
    return linear(reshape(reduce(h, 0, Reduction::mean), {1, h.dim(1)}), m.w_out, m.b_out);
}

namespace {

/// Logistic loss of one graph, written as two-class cross-entropy over [0, s].
Tensor graph_loss(const Tensor& score, int label) {
    const int y[1] = {label};
    return softmax_cross_entropy(concat_last(Tensor::zeros({1, 1}), score), y);
}

} // namespace

metrics::EvalReport evaluate_molecular(const MolecularNet& m, const std::vector<PreparedGraph>& graphs,
                                       const std::vector<std::size_t>& members, const std::string& split) {
    NoGradGuard no_grad;
    std::vector<double> scores;
    std::vector<int> labels;
    double loss = 0.0;
    for (auto g : members) {
        const auto s = molecular_score(m, graphs[g], nullptr);
        scores.push_back(s.item());
        labels.push_back(graphs[g].label);
        loss += graph_loss(s, graphs[g].label).item();
    }
    metrics::EvalReport r;
    r.split = split;
    r.count = members.size();
    r.values["auc"] = metrics::binary_auc(scores, labels);
    r.values["loss"] = loss / static_cast<double>(members.size());
    return r;
}

} // namespace detail

TrainResult train_molecular(const ExperimentConfig& config, const data::MolecularSet& set) {
    config.validate();
    for (auto s : {data::Split::train, data::Split::val, data::Split::test}) {
        const auto members = set.graphs_in(s);
        const auto positives = std::count_if(members.begin(), members.end(), [&](std::size_t g) { return set.graphs[g].label == 1; });
        if (positives == 0 || static_cast<std::size_t>(positives) == members.size()) {
            throw std::invalid_argument(std::string("molecular ") + data::to_string(s) +
                                        " split must contain both labels");
        }
    }
    const Stopwatch clock;
    std::mt19937_64 rng(config.seed);
    const auto graphs = prepare_molecular(config, set);
    const auto net = make_molecular_net(config, set.num_features(), rng);
    auto params = net.parameters();
    AdamState adam(params, {.lr = config.resolved_lr()});
    const double decay = config.resolved_weight_decay();
    auto order = set.graphs_in(data::Split::train);
    const auto val = set.graphs_in(data::Split::val);

    RunRecord rec;
    rec.config = config.to_text();
    rec.task = to_string(config.task);
    rec.model = model::to_string(config.model);
    rec.seed = config.seed;

    const auto named_params = net.named();
    auto best = snapshot(named_params);
    double best_auc = -1.0;
    for (std::size_t epoch = 1; epoch <= config.resolved_epochs(); ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const auto end = std::min(order.size(), start + config.batch_size);
            Tensor batch;
            for (auto k = start; k < end; ++k) {
                const auto l = graph_loss(molecular_score(net, graphs[order[k]], &rng), graphs[order[k]].label);
                batch = batch.defined() ? add(batch, l) : l;
            }
            batch = scale(batch, 1.0 / static_cast<double>(end - start));
            epoch_loss += batch.item() * static_cast<double>(end - start);
            if (decay > 0.0) batch = add(batch, scale(sum_squares(net.net.weights[0]), 0.5 * decay));
            zero_grad(params);
            backward(batch);
            adam_step(params, adam);
        }
        const double auc = evaluate_molecular(net, graphs, val, "val").values.at("auc");
        rec.epochs.push_back({epoch, epoch_loss / static_cast<double>(order.size()), auc});
        if (auc > best_auc) {
            best_auc = auc;
            rec.best_epoch = epoch;
            best = snapshot(named_params);
        }
    }
    restore(named_params, best);
    for (auto s : {data::Split::train, data::Split::val, data::Split::test}) {
        rec.reports.push_back(evaluate_molecular(net, graphs, set.graphs_in(s), data::to_string(s)));
    }
    rec.wall_clock_seconds = clock.seconds();
    return {rec, {config, {{"num_features", set.num_features()}}, snapshot(named_params)}};
}

} // namespace edgegcn::harness
