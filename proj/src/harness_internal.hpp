#pragma once

// Shared pieces of the training harness. Not part of the public API.

#include "edgegcn/edgegcn.hpp"
#include "edgegcn/harness.hpp"
#include "edgegcn/pipeline.hpp"

#include <chrono>
#include <random>

namespace edgegcn::harness::detail {

/// Deep copies of the current values, for best-epoch snapshots.
NamedTensors snapshot(const NamedTensors& tensors);
/// Copies values by name into dst; throws on a missing name or shape mismatch.
void restore(const NamedTensors& dst, const NamedTensors& src);

NamedTensors named(const model::NodeOnlyParams& p, const std::string& prefix);
NamedTensors named(const model::SceneModel& m);

/// Mean and population standard deviation.
std::pair<double, double> mean_std(const std::vector<double>& values);

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// --- citation --------------------------------------------------------------

struct CitationData {
    Tensor features;
    SparseMatrix a_hat;
    std::vector<data::Edge> edges;
    const data::GraphBundle* bundle = nullptr;
};

CitationData prepare_citation(const ExperimentConfig& config, const data::GraphBundle& bundle);
model::NodeOnlyParams make_citation_net(const ExperimentConfig& config, std::size_t features, std::size_t classes,
                                        std::mt19937_64& rng);
metrics::EvalReport evaluate_citation(const model::NodeOnlyParams& net, const CitationData& d, data::Split split);

// --- molecular -------------------------------------------------------------

struct MolecularNet {
    model::NodeOnlyParams net;
    Tensor w_out, b_out;

    NamedTensors named() const;
    std::vector<Tensor> parameters() const;
};

struct PreparedGraph {
    Tensor features;
    SparseMatrix a_hat;
    std::vector<data::Edge> edges;
    int label = 0;
};

std::vector<PreparedGraph> prepare_molecular(const ExperimentConfig& config, const data::MolecularSet& set);
MolecularNet make_molecular_net(const ExperimentConfig& config, std::size_t features, std::mt19937_64& rng);
/// Graph score [1 x 1]: mean readout of node embeddings, then a linear scorer.
Tensor molecular_score(const MolecularNet& m, const PreparedGraph& g, std::mt19937_64* rng);
metrics::EvalReport evaluate_molecular(const MolecularNet& m, const std::vector<PreparedGraph>& graphs,
                                       const std::vector<std::size_t>& members, const std::string& split);

// --- scene -----------------------------------------------------------------

model::SceneModelConfig scene_model_config(const ExperimentConfig& config);
metrics::EvalReport evaluate_scenes(const model::SceneModel& m, const std::vector<data::SceneSample>& scenes,
                                    const ExperimentConfig& config, const std::string& split);

} // namespace edgegcn::harness::detail
