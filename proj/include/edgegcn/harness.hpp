#pragma once

#include "edgegcn/config.hpp"
#include "edgegcn/graph_bundle.hpp"
#include "edgegcn/metrics.hpp"
#include "edgegcn/molecular.hpp"
#include "edgegcn/scene.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace edgegcn::harness {

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

struct EpochLog {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_score = 0.0; // accuracy, AUC or L_SG depending on the task

    bool operator==(const EpochLog&) const = default;
};

struct RunRecord {
    std::string config; // canonical config text for this seed
    std::string task;
    std::string model;
    std::uint64_t seed = 0;
    std::vector<EpochLog> epochs;
    std::size_t best_epoch = 0;
    std::vector<metrics::EvalReport> reports; // train, val, test
    double wall_clock_seconds = 0.0;

    /// Equality of everything except wall-clock time.
    bool same_result(const RunRecord& other) const;
    const metrics::EvalReport& report(const std::string& split) const;
};

std::string to_json(const RunRecord& record);
RunRecord run_record_from_json(const std::string& text);
void save_run_record(const RunRecord& record, const std::filesystem::path& path);
RunRecord load_run_record(const std::filesystem::path& path);

/// Trained parameters plus what is needed to rebuild the model around them.
struct Checkpoint {
    ExperimentConfig config;
    std::map<std::string, std::size_t> dims; // data-dependent widths
    NamedTensors tensors;
};

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

struct TrainResult {
    RunRecord record;
    Checkpoint checkpoint;
};

struct SceneSplits {
    std::vector<data::SceneSample> train, val, test;
};

/// Scenes from data_path/{train,val,test} or, with no path, the synthetic generator.
SceneSplits load_scene_splits(const ExperimentConfig& config);
/// Loads the bundle named by the config and applies its feature preprocessing.
data::GraphBundle load_citation_data(const ExperimentConfig& config);

TrainResult train_citation(const ExperimentConfig& config, const data::GraphBundle& bundle);
TrainResult train_molecular(const ExperimentConfig& config, const data::MolecularSet& set);
TrainResult train_scene(const ExperimentConfig& config, const SceneSplits& scenes);

/// Loads the configured data and trains once with config.seed.
TrainResult train(const ExperimentConfig& config);

/// Seeds seed .. seed + repeat_count - 1, up to config.threads at a time.
/// The data is loaded once and shared read-only. Results are sorted by seed.
std::vector<TrainResult> run_repeats(const ExperimentConfig& config);

/// Evaluates a checkpoint on a dataset of the checkpoint's task. Bundles and
/// molecular sets report every split; a scene directory holding train/val/test
/// subdirectories reports each, any other scene directory reports "all".
std::vector<metrics::EvalReport> evaluate_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& data);

/// One row per run plus mean and std rows per (task, model) over test metrics.
std::vector<std::map<std::string, std::string>> report_rows(const std::vector<RunRecord>& runs);

/// Writes run_<seed>.json, checkpoint_<seed>.json and summary.csv into dir.
void write_outputs(const std::vector<TrainResult>& results, const std::filesystem::path& dir);

/// Every run_*.json below dir, ordered by path.
std::vector<RunRecord> collect_runs(const std::filesystem::path& dir);

} // namespace edgegcn::harness
