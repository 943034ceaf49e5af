#include "edgegcn/harness.hpp"

#include "edgegcn/errors.hpp"
#include "harness_internal.hpp"
#include "text_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace edgegcn::harness {

using nlohmann::json;
namespace fs = std::filesystem;

namespace detail {

NamedTensors snapshot(const NamedTensors& tensors) {
    NamedTensors out;
    out.reserve(tensors.size());
    for (const auto& [name, t] : tensors) out.emplace_back(name, t.clone());
    return out;
}

void restore(const NamedTensors& dst, const NamedTensors& src) {
    std::map<std::string, const Tensor*> by_name;
    for (const auto& [name, t] : src) by_name[name] = &t;
    for (const auto& [name, t] : dst) {
        const auto it = by_name.find(name);
        if (it == by_name.end()) throw std::invalid_argument("checkpoint has no tensor '" + name + "'");
        if (it->second->shape() != t.shape()) {
            throw DimensionError("checkpoint tensor '" + name + "' is " + shape_str(it->second->shape()) +
                                 ", model expects " + shape_str(t.shape()));
        }
        auto target = Tensor(t).mutable_data();
        const auto source = it->second->data();
        std::copy(source.begin(), source.end(), target.begin());
    }
}

NamedTensors named(const model::NodeOnlyParams& p, const std::string& prefix) {
    NamedTensors out;
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        out.emplace_back(prefix + "layer" + std::to_string(l) + ".weight", p.weights[l]);
        out.emplace_back(prefix + "layer" + std::to_string(l) + ".bias", p.biases[l]);
    }
    if (p.w_phi.defined()) out.emplace_back(prefix + "edge_attention.weight", p.w_phi);
    return out;
}

NamedTensors named(const model::SceneModel& m) {
    NamedTensors out;
    for (std::size_t l = 0; l < m.backbone.weights.size(); ++l) {
        out.emplace_back("backbone.layer" + std::to_string(l) + ".weight", m.backbone.weights[l]);
        out.emplace_back("backbone.layer" + std::to_string(l) + ".bias", m.backbone.biases[l]);
    }
    const auto& r = m.reasoning;
    for (const auto& [name, t] : NamedTensors{{"w_g1", r.w_g1},   {"b_g1", r.b_g1},     {"w_g2", r.w_g2},
                                              {"b_g2", r.b_g2},   {"w_phi", r.w_phi},   {"w_pair", r.w_pair},
                                              {"w_theta", r.w_theta}, {"w_fc1", r.w_fc1}, {"b_fc1", r.b_fc1},
                                              {"w_fc2", r.w_fc2}, {"b_fc2", r.b_fc2}}) {
        out.emplace_back("reasoning." + name, t);
    }
    for (const auto& [prefix, h] : {std::pair{"object_head.", &m.object_head}, std::pair{"predicate_head.", &m.predicate_head}}) {
        out.emplace_back(std::string(prefix) + "w1", h->w1);
        out.emplace_back(std::string(prefix) + "b1", h->b1);
        out.emplace_back(std::string(prefix) + "w2", h->w2);
        out.emplace_back(std::string(prefix) + "b2", h->b2);
    }
    return out;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
    if (v.empty()) return {NAN, NAN};
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

} // namespace detail

// --- run records -------------------------------------------------------------

bool RunRecord::same_result(const RunRecord& o) const {
    return config == o.config && task == o.task && model == o.model && seed == o.seed && epochs == o.epochs &&
           best_epoch == o.best_epoch && reports == o.reports;
}

const metrics::EvalReport& RunRecord::report(const std::string& split) const {
    for (const auto& r : reports)
        if (r.split == split) return r;
    throw std::out_of_range("run record has no '" + split + "' report");
}

std::string to_json(const RunRecord& r) {
    json epochs = json::array();
    for (const auto& e : r.epochs) epochs.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_score", e.val_score}});
    json reports = json::array();
    for (const auto& rep : r.reports) reports.push_back({{"split", rep.split}, {"count", rep.count}, {"values", rep.values}});
    const json j{{"config", r.config},       {"task", r.task},       {"model", r.model},
                 {"seed", r.seed},           {"epochs", epochs},     {"best_epoch", r.best_epoch},
                 {"reports", reports},       {"wall_clock_seconds", r.wall_clock_seconds}};
    return j.dump(2);
}

RunRecord run_record_from_json(const std::string& text) {
    try {
        const auto j = json::parse(text);
        RunRecord r;
        r.config = j.at("config").get<std::string>();
        r.task = j.at("task").get<std::string>();
        r.model = j.at("model").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& e : j.at("epochs")) {
            r.epochs.push_back({e.at("epoch").get<std::size_t>(), e.at("train_loss").get<double>(), e.at("val_score").get<double>()});
        }
        r.best_epoch = j.at("best_epoch").get<std::size_t>();
        for (const auto& rep : j.at("reports")) {
            r.reports.push_back({rep.at("split").get<std::string>(), rep.at("count").get<std::size_t>(),
                                 rep.at("values").get<std::map<std::string, double>>()});
        }
        r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
        return r;
    } catch (const json::exception& e) {
        throw ParseError("<run record>", 0, e.what());
    }
}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

void save_run_record(const RunRecord& record, const fs::path& path) { io::open_out(path) << to_json(record) << '\n'; }

RunRecord load_run_record(const fs::path& path) {
    try {
        return run_record_from_json(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string(), 0, e.what());
    }
}

// --- checkpoints -------------------------------------------------------------

void save_checkpoint(const Checkpoint& c, const fs::path& path) {
    json tensors = json::array();
    for (const auto& [name, t] : c.tensors) {
        tensors.push_back({{"name", name}, {"shape", t.shape()}, {"data", std::vector<double>(t.data().begin(), t.data().end())}});
    }
    const json j{{"config", c.config.to_text()}, {"dims", c.dims}, {"tensors", tensors}};
    io::open_out(path) << j.dump() << '\n';
}

Checkpoint load_checkpoint(const fs::path& path) {
    const auto text = read_file(path);
    try {
        const auto j = json::parse(text);
        Checkpoint c;
        c.config = parse_config(j.at("config").get<std::string>(), path.string());
        c.dims = j.at("dims").get<std::map<std::string, std::size_t>>();
        for (const auto& t : j.at("tensors")) {
            c.tensors.emplace_back(t.at("name").get<std::string>(),
                                   Tensor::from(t.at("shape").get<Shape>(), t.at("data").get<std::vector<double>>()));
        }
        return c;
    } catch (const json::exception& e) {
        throw ParseError(path.string(), 0, e.what());
    }
}

// --- orchestration -------------------------------------------------------------

TrainResult train(const ExperimentConfig& config) {
    config.validate();
    switch (config.task) {
    case Task::citation: return train_citation(config, load_citation_data(config));
    case Task::molecular: return train_molecular(config, data::load_molecular_set(config.data_path));
    case Task::scene: return train_scene(config, load_scene_splits(config));
    }
    throw std::logic_error("unreachable");
}

std::vector<TrainResult> run_repeats(const ExperimentConfig& config) {
    config.validate();
    data::GraphBundle bundle;
    data::MolecularSet molecules;
    SceneSplits scenes;
    switch (config.task) {
    case Task::citation: bundle = load_citation_data(config); break;
    case Task::molecular: molecules = data::load_molecular_set(config.data_path); break;
    case Task::scene: scenes = load_scene_splits(config); break;
    }

    std::vector<TrainResult> results(config.repeat_count);
    std::vector<std::exception_ptr> errors(config.repeat_count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r; (r = next.fetch_add(1)) < config.repeat_count;) {
            auto run_config = config;
            run_config.seed = config.seed + r;
            run_config.repeat_count = 1;
            try {
                switch (config.task) {
                case Task::citation: results[r] = train_citation(run_config, bundle); break;
                case Task::molecular: results[r] = train_molecular(run_config, molecules); break;
                case Task::scene: results[r] = train_scene(run_config, scenes); break;
                }
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    const auto workers = std::min(config.threads, config.repeat_count);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::sort(results.begin(), results.end(),
              [](const TrainResult& a, const TrainResult& b) { return a.record.seed < b.record.seed; });
    return results;
}

std::vector<metrics::EvalReport> evaluate_checkpoint(const Checkpoint& c, const fs::path& path) {
    const auto& cfg = c.config;
    std::mt19937_64 rng(0);
    std::vector<metrics::EvalReport> out;
    switch (cfg.task) {
    case Task::citation: {
        auto run_cfg = cfg;
        run_cfg.data_path = path;
        const auto bundle = load_citation_data(run_cfg);
        auto net = detail::make_citation_net(cfg, bundle.num_features, bundle.num_classes, rng);
        detail::restore(detail::named(net, ""), c.tensors);
        const auto d = detail::prepare_citation(cfg, bundle);
        for (auto s : {data::Split::train, data::Split::val, data::Split::test}) {
            if (!bundle.nodes_in(s).empty()) out.push_back(detail::evaluate_citation(net, d, s));
        }
        break;
    }
    case Task::molecular: {
        const auto set = data::load_molecular_set(path);
        auto net = detail::make_molecular_net(cfg, set.num_features(), rng);
        detail::restore(net.named(), c.tensors);
        const auto graphs = detail::prepare_molecular(cfg, set);
        for (auto s : {data::Split::train, data::Split::val, data::Split::test}) {
            if (!set.graphs_in(s).empty()) out.push_back(detail::evaluate_molecular(net, graphs, set.graphs_in(s), data::to_string(s)));
        }
        break;
    }
    case Task::scene: {
        auto mc = detail::scene_model_config(cfg);
        const auto model = model::SceneModel::init(mc, rng);
        detail::restore(detail::named(model), c.tensors);
        if (fs::is_directory(path / "train") || fs::is_directory(path / "test")) {
            for (const char* split : {"train", "val", "test"}) {
                if (fs::is_directory(path / split)) {
                    out.push_back(detail::evaluate_scenes(model, data::load_scene_collection(path / split), cfg, split));
                }
            }
        } else {
            out.push_back(detail::evaluate_scenes(model, data::load_scene_collection(path), cfg, "all"));
        }
        break;
    }
    }
    return out;
}

std::vector<std::map<std::string, std::string>> report_rows(const std::vector<RunRecord>& runs) {
    std::vector<std::map<std::string, std::string>> rows;
    std::map<std::pair<std::string, std::string>, std::map<std::string, std::vector<double>>> groups;
    for (const auto& r : runs) {
        std::map<std::string, std::string> row{{"task", r.task},
                                               {"model", r.model},
                                               {"seed", std::to_string(r.seed)},
                                               {"best_epoch", std::to_string(r.best_epoch)},
                                               {"wall_clock_seconds", io::format_double(r.wall_clock_seconds)}};
        for (const auto& rep : r.reports) {
            for (const auto& [k, v] : rep.values) {
                row[rep.split + "." + k] = io::format_double(v);
                if (rep.split == "test") groups[{r.task, r.model}]["test." + k].push_back(v);
            }
        }
        rows.push_back(std::move(row));
    }
    for (const auto& [key, metrics] : groups) {
        std::map<std::string, std::string> mean{{"task", key.first}, {"model", key.second}, {"seed", "mean"}};
        std::map<std::string, std::string> stdev{{"task", key.first}, {"model", key.second}, {"seed", "std"}};
        for (const auto& [name, values] : metrics) {
            const auto [m, s] = detail::mean_std(values);
            mean[name] = io::format_double(m);
            stdev[name] = io::format_double(s);
        }
        rows.push_back(std::move(mean));
        rows.push_back(std::move(stdev));
    }
    return rows;
}

void write_outputs(const std::vector<TrainResult>& results, const fs::path& dir) {
    fs::create_directories(dir);
    std::vector<RunRecord> runs;
    for (const auto& r : results) {
        const auto tag = std::to_string(r.record.seed);
        save_run_record(r.record, dir / ("run_" + tag + ".json"));
        save_checkpoint(r.checkpoint, dir / ("checkpoint_" + tag + ".json"));
        runs.push_back(r.record);
    }
    metrics::write_reports_csv(dir / "summary.csv", report_rows(runs));
}

std::vector<RunRecord> collect_runs(const fs::path& dir) {
    std::vector<fs::path> paths;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.rfind("run_", 0) == 0 && entry.path().extension() == ".json") {
            paths.push_back(entry.path());
        }
    }
    std::sort(paths.begin(), paths.end());
    std::vector<RunRecord> runs;
    for (const auto& p : paths) runs.push_back(load_run_record(p));
    return runs;
}

} // namespace edgegcn::harness
