#include "edgegcn/config.hpp"

#include "edgegcn/errors.hpp"
#include "text_io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace edgegcn::harness {

const char* to_string(Task t) {
    switch (t) {
    case Task::citation: return "citation";
    case Task::molecular: return "molecular";
    case Task::scene: return "scene";
    }
    return "?";
}

Task parse_task(const std::string& name) {
    if (name == "citation") return Task::citation;
    if (name == "molecular") return Task::molecular;
    if (name == "scene") return Task::scene;
    throw ConfigError("unknown task '" + name + "'");
}

std::size_t ExperimentConfig::resolved_epochs() const {
    return epochs.value_or(task == Task::citation ? 200 : task == Task::molecular ? 100 : 30);
}

double ExperimentConfig::resolved_lr() const { return lr.value_or(task == Task::citation ? 0.01 : 0.001); }

double ExperimentConfig::resolved_weight_decay() const { return weight_decay.value_or(task == Task::citation ? 5e-4 : 0.0); }

double ExperimentConfig::resolved_dropout() const { return dropout.value_or(task == Task::citation ? 0.5 : 0.0); }

std::size_t ExperimentConfig::resolved_hidden() const { return hidden.value_or(task == Task::citation ? 16 : 64); }

void ExperimentConfig::validate() const {
    using model::ModelKind;
    if (task != Task::scene && model != ModelKind::gcn && model != ModelKind::edgegcn_Ae) {
        throw ConfigError(std::string("model ") + model::to_string(model) + " needs task = scene; " + to_string(task) +
                          " supports gcn and edgegcn_Ae");
    }
    if (repeat_count == 0) throw ConfigError("repeat_count must be at least 1");
    if (threads == 0) throw ConfigError("threads must be at least 1");
    if (resolved_epochs() == 0) throw ConfigError("train.epochs must be at least 1");
    if (!(resolved_lr() > 0.0)) throw ConfigError("train.lr must be positive");
    if (resolved_dropout() < 0.0 || resolved_dropout() >= 1.0) throw ConfigError("train.dropout must lie in [0, 1)");
    if (batch_size == 0) throw ConfigError("train.batch_size must be at least 1");
    if (task == Task::scene && resolved_c_edge() != 2 * c_node) {
        throw ConfigError("model.c_edge must equal 2 * model.c_node for scene graphs");
    }
    if (task != Task::scene && data_path.empty()) throw ConfigError("data.path is required for task " + std::string(to_string(task)));
    if (synth_min_instances < 2 || synth_max_instances > 32 || synth_min_instances > synth_max_instances) {
        throw ConfigError("synthetic instance range must lie within [2, 32]");
    }
}

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end || v.empty()) throw ConfigError("bad value '" + v + "' for " + key);
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("bad value '" + v + "' for " + key + " (expected true or false)");
}

std::string fmt(double v) { return io::format_double(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

template <class E, class P>
E parse_enum(const std::string& key, const std::string& v, P parse) {
    try {
        return parse(v);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

std::string join(const std::vector<std::size_t>& v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + std::to_string(v[k]);
    return out;
}

} // namespace

void ExperimentConfig::set(const std::string& key, const std::string& v) {
    using Setter = std::function<void(ExperimentConfig&, const std::string&)>;
    auto size = [](const char* name, std::size_t ExperimentConfig::*f) {
        return Setter([name, f](ExperimentConfig& c, const std::string& v) { c.*f = parse_number<std::size_t>(name, v); });
    };
    static const std::map<std::string, Setter> setters = [&] {
        std::map<std::string, Setter> s;
        s["task"] = [](auto& c, auto& v) { c.task = parse_task(v); };
        s["model"] = [](auto& c, auto& v) { c.model = parse_enum<model::ModelKind>("model", v, model::parse_model_kind); };
        s["seed"] = [](auto& c, auto& v) { c.seed = parse_number<std::uint64_t>("seed", v); };
        s["repeat_count"] = size("repeat_count", &ExperimentConfig::repeat_count);
        s["threads"] = size("threads", &ExperimentConfig::threads);
        s["output_dir"] = [](auto& c, auto& v) { c.output_dir = v; };
        s["train.epochs"] = [](auto& c, auto& v) { c.epochs = parse_number<std::size_t>("train.epochs", v); };
        s["train.lr"] = [](auto& c, auto& v) { c.lr = parse_number<double>("train.lr", v); };
        s["train.weight_decay"] = [](auto& c, auto& v) { c.weight_decay = parse_number<double>("train.weight_decay", v); };
        s["train.dropout"] = [](auto& c, auto& v) { c.dropout = parse_number<double>("train.dropout", v); };
        s["train.batch_size"] = size("train.batch_size", &ExperimentConfig::batch_size);
        s["model.c_node"] = size("model.c_node", &ExperimentConfig::c_node);
        s["model.c_node_inner"] = [](auto& c, auto& v) { c.c_node_inner = parse_number<std::size_t>("model.c_node_inner", v); };
        s["model.c_edge"] = [](auto& c, auto& v) { c.c_edge = parse_number<std::size_t>("model.c_edge", v); };
        s["model.c_edge_inner"] = [](auto& c, auto& v) { c.c_edge_inner = parse_number<std::size_t>("model.c_edge_inner", v); };
        s["model.backbone_hidden"] = [](auto& c, auto& v) {
            c.backbone_hidden.clear();
            for (const auto& part : io::split(v, ',')) {
                if (!part.empty()) c.backbone_hidden.push_back(parse_number<std::size_t>("model.backbone_hidden", part));
            }
        };
        s["model.hidden"] = [](auto& c, auto& v) { c.hidden = parse_number<std::size_t>("model.hidden", v); };
        s["model.aggregation"] = [](auto& c, auto& v) { c.aggregation = parse_enum<Reduction>("model.aggregation", v, parse_reduction); };
        s["model.pooling"] = [](auto& c, auto& v) { c.pooling = parse_enum<Reduction>("model.pooling", v, parse_reduction); };
        s["model.adjacency_norm"] = [](auto& c, auto& v) {
            c.adjacency_norm = parse_enum<data::NormMode>("model.adjacency_norm", v, data::parse_norm_mode);
        };
        s["model.include_diagonal"] = [](auto& c, auto& v) { c.include_diagonal = parse_bool("model.include_diagonal", v); };
        s["model.residual"] = [](auto& c, auto& v) { c.residual = parse_bool("model.residual", v); };
        s["model.edge_source"] = [](auto& c, auto& v) {
            c.edge_source = parse_enum<model::EdgeSource>("model.edge_source", v, model::parse_edge_source);
        };
        s["data.path"] = [](auto& c, auto& v) { c.data_path = v; };
        s["data.normalize_features"] = [](auto& c, auto& v) { c.normalize_features = parse_bool("data.normalize_features", v); };
        s["synthetic.seed"] = [](auto& c, auto& v) { c.synth_seed = parse_number<std::uint64_t>("synthetic.seed", v); };
        s["synthetic.train"] = size("synthetic.train", &ExperimentConfig::synth_train);
        s["synthetic.val"] = size("synthetic.val", &ExperimentConfig::synth_val);
        s["synthetic.test"] = size("synthetic.test", &ExperimentConfig::synth_test);
        s["synthetic.min_instances"] = size("synthetic.min_instances", &ExperimentConfig::synth_min_instances);
        s["synthetic.max_instances"] = size("synthetic.max_instances", &ExperimentConfig::synth_max_instances);
        s["synthetic.object_classes"] = size("synthetic.object_classes", &ExperimentConfig::synth_object_classes);
        s["synthetic.predicate_classes"] = size("synthetic.predicate_classes", &ExperimentConfig::synth_predicate_classes);
        s["synthetic.points_per_instance"] = size("synthetic.points_per_instance", &ExperimentConfig::synth_points_per_instance);
        s["eval.triplet_id_only"] = [](auto& c, auto& v) { c.triplet_id_only = parse_bool("eval.triplet_id_only", v); };
        s["eval.f1_include_none"] = [](auto& c, auto& v) { c.f1_include_none = parse_bool("eval.f1_include_none", v); };
        return s;
    }();
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(*this, v);
}

std::string ExperimentConfig::to_text() const {
    std::ostringstream o;
    o << "task = " << to_string(task) << "\nmodel = " << model::to_string(model) << "\nseed = " << seed
      << "\nrepeat_count = " << repeat_count << "\nthreads = " << threads << "\noutput_dir = " << output_dir.string()
      << "\n\n[train]\nepochs = " << resolved_epochs() << "\nlr = " << fmt(resolved_lr())
      << "\nweight_decay = " << fmt(resolved_weight_decay()) << "\ndropout = " << fmt(resolved_dropout())
      << "\nbatch_size = " << batch_size << "\n\n[model]\nc_node = " << c_node
      << "\nc_node_inner = " << resolved_c_node_inner() << "\nc_edge = " << resolved_c_edge()
      << "\nc_edge_inner = " << resolved_c_edge_inner() << "\nbackbone_hidden = " << join(backbone_hidden)
      << "\nhidden = " << resolved_hidden() << "\naggregation = " << edgegcn::to_string(aggregation)
      << "\npooling = " << edgegcn::to_string(pooling) << "\nadjacency_norm = " << data::to_string(adjacency_norm)
      << "\ninclude_diagonal = " << fmt(include_diagonal) << "\nresidual = " << fmt(residual)
      << "\nedge_source = " << model::to_string(edge_source) << "\n\n[data]\npath = " << data_path.string()
      << "\nnormalize_features = " << fmt(normalize_features) << "\n\n[synthetic]\nseed = " << synth_seed
      << "\ntrain = " << synth_train << "\nval = " << synth_val << "\ntest = " << synth_test
      << "\nmin_instances = " << synth_min_instances << "\nmax_instances = " << synth_max_instances
      << "\nobject_classes = " << synth_object_classes << "\npredicate_classes = " << synth_predicate_classes
      << "\npoints_per_instance = " << synth_points_per_instance << "\n\n[eval]\ntriplet_id_only = "
      << fmt(triplet_id_only) << "\nf1_include_none = " << fmt(f1_include_none) << "\n";
    return o.str();
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
    ExperimentConfig c;
    std::istringstream in(text);
    std::string raw, section;
    std::size_t ln = 0;
    while (std::getline(in, raw)) {
        ++ln;
        auto line = io::trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(origin + ":" + std::to_string(ln) + ": unterminated section header");
            section = io::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(origin + ":" + std::to_string(ln) + ": expected key = value");
        const auto key = io::trim(line.substr(0, eq));
        const auto full = section.empty() ? key : section + "." + key;
        try {
            c.set(full, io::trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(ln) + ": " + e.what());
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

} // namespace edgegcn::harness
