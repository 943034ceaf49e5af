#pragma once

#include "edgegcn/adjacency.hpp"
#include "edgegcn/edgegcn.hpp"
#include "edgegcn/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace edgegcn::harness {

enum class Task { citation, molecular, scene };

const char* to_string(Task t);
Task parse_task(const std::string& name);

/// Everything that determines a run. Optional fields fall back to task
/// dependent defaults; query them through the resolved accessors.
///
/// Text form: "key = value" lines, with "[section]" headers prefixing the
/// keys that follow (so "epochs" under "[train]" is "train.epochs").
/// '#' starts a comment. Unknown keys are errors.
struct ExperimentConfig {
    Task task = Task::scene;
    model::ModelKind model = model::ModelKind::edgegcn_full;
    std::uint64_t seed = 0;
    std::size_t repeat_count = 1;
    std::size_t threads = 1;
    std::filesystem::path output_dir;

    // train
    std::optional<std::size_t> epochs;
    std::optional<double> lr;
    std::optional<double> weight_decay;
    std::optional<double> dropout;
    std::size_t batch_size = 32;

    // model
    std::size_t c_node = 256;
    std::optional<std::size_t> c_node_inner;
    std::optional<std::size_t> c_edge;
    std::optional<std::size_t> c_edge_inner;
    std::vector<std::size_t> backbone_hidden{64, 128};
    std::optional<std::size_t> hidden;
    Reduction aggregation = Reduction::mean;
    Reduction pooling = Reduction::max;
    data::NormMode adjacency_norm = data::NormMode::row;
    bool include_diagonal = true;
    bool residual = true;
    model::EdgeSource edge_source = model::EdgeSource::layer_input;

    // data
    std::filesystem::path data_path;
    bool normalize_features = true;

    // synthetic scenes, used when data_path is empty
    std::uint64_t synth_seed = 1000;
    std::size_t synth_train = 200;
    std::size_t synth_val = 50;
    std::size_t synth_test = 50;
    std::size_t synth_min_instances = 4;
    std::size_t synth_max_instances = 8;
    std::size_t synth_object_classes = 8;
    std::size_t synth_predicate_classes = 5;
    std::size_t synth_points_per_instance = 32;

    // eval
    bool triplet_id_only = false;
    bool f1_include_none = false;

    std::size_t resolved_epochs() const;
    double resolved_lr() const;
    double resolved_weight_decay() const;
    double resolved_dropout() const;
    std::size_t resolved_hidden() const;
    std::size_t resolved_c_node_inner() const { return c_node_inner.value_or(c_node / 2); }
    std::size_t resolved_c_edge() const { return c_edge.value_or(2 * c_node); }
    std::size_t resolved_c_edge_inner() const { return c_edge_inner.value_or(resolved_c_edge() / 2); }

    /// Throws ConfigError for incompatible combinations.
    void validate() const;

    /// Sets one dotted key from its text value. Throws ConfigError.
    void set(const std::string& key, const std::string& value);

    /// Canonical text with every key and resolved default spelled out.
    std::string to_text() const;

    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

} // namespace edgegcn::harness
