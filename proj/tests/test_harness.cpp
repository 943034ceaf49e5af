#include "edgegcn/errors.hpp"
#include "edgegcn/harness.hpp"
#include "support/datasets.hpp"

#include "../src/harness_internal.hpp"

#include <gtest/gtest.h>

#include <chrono>

using namespace edgegcn;
using namespace edgegcn::harness;
namespace fs = std::filesystem;

namespace {

// Small enough for a unit test, still exercises every stage of the pipeline.
ExperimentConfig tiny_scene_config(model::ModelKind kind = model::ModelKind::edgegcn_full) {
    ExperimentConfig c;
    c.task = Task::scene;
    c.model = kind;
    c.c_node = 16;
    c.backbone_hidden = {8};
    c.epochs = 3;
    c.synth_train = 6;
    c.synth_val = 3;
    c.synth_test = 3;
    c.synth_max_instances = 5;
    c.synth_points_per_instance = 8;
    return c;
}

ExperimentConfig citation_config(const fs::path& path, model::ModelKind kind = model::ModelKind::gcn) {
    ExperimentConfig c;
    c.task = Task::citation;
    c.model = kind;
    c.data_path = path;
    c.epochs = 20;
    return c;
}

} // namespace

// --- config ----------------------------------------------------------------

TEST(Config, ParsesSectionsAndComments) {
    const auto c = parse_config("task = citation  # trailing\nmodel = edgegcn_Ae\nseed = 7\n\n[train]\nepochs = 12\n"
                                "lr=0.05\n[data]\npath = /tmp/x\n");
    EXPECT_EQ(c.task, Task::citation);
    EXPECT_EQ(c.model, model::ModelKind::edgegcn_Ae);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.resolved_epochs(), 12u);
    EXPECT_DOUBLE_EQ(c.resolved_lr(), 0.05);
    EXPECT_EQ(c.data_path, fs::path("/tmp/x"));
    EXPECT_DOUBLE_EQ(c.resolved_weight_decay(), 5e-4);
}

TEST(Config, TaskDefaultsDiffer) {
    const auto scene = parse_config("task = scene\n");
    EXPECT_DOUBLE_EQ(scene.resolved_lr(), 0.001);
    EXPECT_EQ(scene.resolved_c_edge(), 2 * scene.c_node);
    EXPECT_EQ(scene.resolved_c_node_inner(), scene.c_node / 2);
    const auto mol = parse_config("task = molecular\nmodel = gcn\n[data]\npath = m.jsonl\n");
    EXPECT_DOUBLE_EQ(mol.resolved_lr(), 0.001);
    EXPECT_DOUBLE_EQ(mol.resolved_dropout(), 0.0);
}

TEST(Config, UnknownKeyNamesLine) {
    try {
        parse_config("task = scene\n[train]\nepoch = 3\n", "exp.cfg");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("exp.cfg:3"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("train.epoch"), std::string::npos) << e.what();
    }
}

TEST(Config, RejectsBadValues) {
    EXPECT_THROW(parse_config("seed = -1\n"), ConfigError);
    EXPECT_THROW(parse_config("model = edgegcn_x\n"), ConfigError);
    EXPECT_THROW(parse_config("[model]\nresidual = yes\n"), ConfigError);
    EXPECT_THROW(parse_config("just words\n"), ConfigError);
}

TEST(Config, ValidatesModelTaskCompatibility) {
    EXPECT_THROW(parse_config("task = citation\nmodel = edgegcn_Av\n[data]\npath = x\n"), ConfigError);
    EXPECT_THROW(parse_config("task = citation\nmodel = edgegcn_full\n[data]\npath = x\n"), ConfigError);
    EXPECT_THROW(parse_config("task = citation\nmodel = gcn\n"), ConfigError); // no data path
    EXPECT_THROW(parse_config("task = scene\n[model]\nc_node = 8\nc_edge = 12\n"), ConfigError);
    EXPECT_NO_THROW(parse_config("task = scene\nmodel = edgegcn_Av\n"));
}

TEST(Config, TextFormRoundTrips) {
    auto c = tiny_scene_config();
    c.aggregation = Reduction::max;
    c.triplet_id_only = true;
    c.lr = 0.0123456789;
    const auto text = c.to_text();
    const auto back = parse_config(text);
    EXPECT_EQ(back.to_text(), text);
    EXPECT_EQ(back.aggregation, Reduction::max);
    EXPECT_EQ(back.backbone_hidden, c.backbone_hidden);
    EXPECT_EQ(back.resolved_lr(), 0.0123456789);
}

TEST(Config, EveryCanonicalKeyIsSettable) {
    // to_text spells out all fields, so parsing it touches every setter.
    EXPECT_NO_THROW(parse_config(ExperimentConfig{}.to_text()));
}

// --- records and checkpoints -----------------------------------------------

TEST(RunRecord, JsonRoundTrip) {
    RunRecord r;
    r.config = "task = scene\n";
    r.task = "scene";
    r.model = "edgegcn_full";
    r.seed = 42;
    r.epochs = {{1, 0.1 + 0.2, 0.3}, {2, 1.0 / 3.0, 0.25}};
    r.best_epoch = 2;
    r.reports = {{"test", 5, {{"node_r1", 0.8}, {"loss", 1e-17}}}};
    r.wall_clock_seconds = 1.5;
    const auto back = run_record_from_json(to_json(r));
    EXPECT_TRUE(back.same_result(r));
    EXPECT_EQ(back.wall_clock_seconds, 1.5);
    EXPECT_EQ(back.report("test").values.at("loss"), 1e-17);
    EXPECT_THROW(back.report("train"), std::out_of_range);
}

TEST(RunRecord, SameResultIgnoresWallClock) {
    RunRecord a, b;
    a.wall_clock_seconds = 1.0;
    b.wall_clock_seconds = 2.0;
    EXPECT_TRUE(a.same_result(b));
    b.best_epoch = 1;
    EXPECT_FALSE(a.same_result(b));
}

TEST(Checkpoint, SceneRoundTripReproducesMetrics) {
    const auto dir = datasets::scratch_dir("ckpt_scene");
    auto cfg = tiny_scene_config();
    const auto splits = load_scene_splits(cfg);
    for (auto [name, scenes] : {std::pair{"train", &splits.train}, std::pair{"val", &splits.val}, std::pair{"test", &splits.test}}) {
        for (std::size_t k = 0; k < scenes->size(); ++k)
            data::write_scene((*scenes)[k], dir / "data" / name / ("scene_" + std::to_string(k)));
    }
    cfg.data_path = dir / "data";
    const auto result = train(cfg);
    save_checkpoint(result.checkpoint, dir / "ckpt.json");
    const auto loaded = load_checkpoint(dir / "ckpt.json");
    EXPECT_EQ(loaded.config.to_text(), result.checkpoint.config.to_text());
    const auto reports = evaluate_checkpoint(loaded, dir / "data");
    ASSERT_EQ(reports.size(), 3u);
    for (const auto& r : reports) EXPECT_EQ(r, result.record.report(r.split)) << r.split;
    fs::remove_all(dir);
}

TEST(Checkpoint, CitationRoundTripReproducesMetrics) {
    const auto dir = datasets::scratch_dir("ckpt_cite");
    data::write_graph_bundle(datasets::planted_partition(3), dir / "bundle");
    const auto cfg = citation_config(dir / "bundle", model::ModelKind::edgegcn_Ae);
    const auto result = train(cfg);
    save_checkpoint(result.checkpoint, dir / "ckpt.json");
    const auto reports = evaluate_checkpoint(load_checkpoint(dir / "ckpt.json"), dir / "bundle");
    ASSERT_EQ(reports.size(), 3u);
    for (const auto& r : reports) EXPECT_EQ(r, result.record.report(r.split)) << r.split;
    fs::remove_all(dir);
}

TEST(Checkpoint, MissingTensorIsAnError) {
    const auto dir = datasets::scratch_dir("ckpt_bad");
    auto result = train_scene(tiny_scene_config(), load_scene_splits(tiny_scene_config()));
    result.checkpoint.tensors.pop_back();
    save_checkpoint(result.checkpoint, dir / "ckpt.json");
    auto cfg = tiny_scene_config();
    const auto splits = load_scene_splits(cfg);
    for (std::size_t k = 0; k < splits.test.size(); ++k) data::write_scene(splits.test[k], dir / "scenes" / std::to_string(k));
    EXPECT_THROW(evaluate_checkpoint(load_checkpoint(dir / "ckpt.json"), dir / "scenes"), std::exception);
    fs::remove_all(dir);
}

// --- determinism -----------------------------------------------------------

TEST(Determinism, SceneRunsAreBitIdentical) {
    const auto cfg = tiny_scene_config();
    const auto a = train(cfg), b = train(cfg);
    EXPECT_TRUE(a.record.same_result(b.record));
    ASSERT_EQ(a.checkpoint.tensors.size(), b.checkpoint.tensors.size());
    for (std::size_t k = 0; k < a.checkpoint.tensors.size(); ++k) {
        const auto x = a.checkpoint.tensors[k].second.data(), y = b.checkpoint.tensors[k].second.data();
        EXPECT_TRUE(std::equal(x.begin(), x.end(), y.begin(), y.end())) << a.checkpoint.tensors[k].first;
    }
}

TEST(Determinism, DifferentSeedsDiffer) {
    auto cfg = tiny_scene_config();
    const auto a = train(cfg);
    cfg.seed = 1;
    EXPECT_FALSE(a.record.same_result(train(cfg).record));
}

TEST(Determinism, ParallelRepeatsMatchSequentialRuns) {
    auto cfg = tiny_scene_config();
    cfg.repeat_count = 4;
    cfg.threads = 3;
    const auto parallel = run_repeats(cfg);
    ASSERT_EQ(parallel.size(), 4u);
    for (std::size_t r = 0; r < 4; ++r) {
        EXPECT_EQ(parallel[r].record.seed, r);
        // The recorded config text alone reproduces the run.
        const auto alone = train(parse_config(parallel[r].record.config));
        EXPECT_TRUE(alone.record.same_result(parallel[r].record)) << "seed " << r;
    }
}

TEST(Determinism, CitationRunsAreBitIdentical) {
    const auto dir = datasets::scratch_dir("det_cite");
    data::write_graph_bundle(datasets::planted_partition(5), dir);
    auto cfg = citation_config(dir, model::ModelKind::edgegcn_Ae);
    cfg.repeat_count = 3;
    cfg.threads = 2;
    const auto a = run_repeats(cfg), b = run_repeats(cfg);
    for (std::size_t r = 0; r < 3; ++r) EXPECT_TRUE(a[r].record.same_result(b[r].record));
    fs::remove_all(dir);
}

// --- training smoke tests --------------------------------------------------

TEST(TrainCitation, LossDecreasesOnPlantedPartition) {
    const auto dir = datasets::scratch_dir("smoke_cite");
    data::write_graph_bundle(datasets::planted_partition(11, 3, 200, 50), dir);
    for (auto kind : {model::ModelKind::gcn, model::ModelKind::edgegcn_Ae}) {
        const auto rec = train(citation_config(dir, kind)).record;
        ASSERT_EQ(rec.epochs.size(), 20u);
        int decreases = 0;
        for (std::size_t e = 1; e < rec.epochs.size(); ++e) decreases += rec.epochs[e].train_loss < rec.epochs[e - 1].train_loss;
        // 19 consecutive pairs; at least 15 must go down.
        EXPECT_GE(decreases, 15) << model::to_string(kind);
        EXPECT_GT(rec.report("test").values.at("accuracy"), 1.0 / 3.0);
    }
    fs::remove_all(dir);
}

TEST(TrainCitation, MissingSplitIsAnError) {
    auto b = datasets::planted_partition(1);
    for (auto& s : b.split)
        if (s == data::Split::val) s = data::Split::train;
    EXPECT_THROW(train_citation(citation_config("unused"), b), std::invalid_argument);
}

TEST(TrainCitation, BadBundleFailsBeforeTraining) {
    EXPECT_THROW(train(citation_config(fs::path(EDGEGCN_FIXTURES) / "bad_edge_bundle")), ParseError);
}

TEST(TrainMolecular, SeparableToySetReachesHighAuc) {
    const auto set = datasets::separable_molecules(2);
    for (auto kind : {model::ModelKind::gcn, model::ModelKind::edgegcn_Ae}) {
        ExperimentConfig cfg;
        cfg.task = Task::molecular;
        cfg.model = kind;
        cfg.data_path = "unused";
        cfg.epochs = 50;
        cfg.batch_size = 4;
        const auto rec = train_molecular(cfg, set).record;
        EXPECT_GE(rec.report("test").values.at("auc"), 0.95) << model::to_string(kind);
    }
}

TEST(TrainMolecular, SingleClassSplitIsAnError) {
    auto set = datasets::separable_molecules(2);
    for (auto& g : set.graphs)
        if (g.split == data::Split::test) g.label = 1;
    ExperimentConfig cfg;
    cfg.task = Task::molecular;
    cfg.model = model::ModelKind::gcn;
    cfg.data_path = "unused";
    EXPECT_THROW(train_molecular(cfg, set), std::invalid_argument);
}

TEST(TrainMolecular, ReadoutIsMeanThenLinear) {
    ExperimentConfig cfg;
    cfg.task = Task::molecular;
    cfg.model = model::ModelKind::gcn;
    cfg.data_path = "unused";
    cfg.hidden = 2;
    std::mt19937_64 rng(0);
    auto net = harness::detail::make_molecular_net(cfg, 2, rng);
    // Identity layers, zero biases: embeddings are relu of the raw features.
    for (auto& w : net.net.weights) {
        auto d = w.mutable_data();
        std::fill(d.begin(), d.end(), 0.0);
        d[0] = d[3] = 1.0;
    }
    for (auto& b : net.net.biases) std::ranges::fill(b.mutable_data(), 0.0);
    net.w_out.mutable_data()[0] = 0.5;
    net.w_out.mutable_data()[1] = -1.0;
    net.b_out.mutable_data()[0] = 0.25;

    data::MolecularSet set;
    data::MolecularGraph g;
    g.num_nodes = 2;
    g.num_features = 2;
    g.node_features = {1.0, 2.0, 3.0, -4.0};
    set.graphs.push_back(g);
    const auto prepared = harness::detail::prepare_molecular(cfg, set);
    // No edges, so the normalized adjacency is the identity: h = [[1,2],[3,0]],
    // mean [2,1], score 0.5*2 - 1*1 + 0.25.
    const auto score = harness::detail::molecular_score(net, prepared[0], nullptr);
    ASSERT_EQ(score.shape(), (Shape{1, 1}));
    EXPECT_DOUBLE_EQ(score.item(), 0.25);
}

TEST(TrainScene, ReportsAllMetricFamilies) {
    const auto rec = train(tiny_scene_config()).record;
    const auto& test = rec.report("test");
    for (const char* key : {"loss", "node_r1", "node_r5", "edge_f1_1", "edge_f1_3", "edge_f1_5", "triplet_r50", "triplet_r100"})
        EXPECT_TRUE(test.values.count(key)) << key;
    EXPECT_FALSE(test.values.count("node_r10")); // only 8 object classes
    EXPECT_EQ(rec.epochs.size(), 3u);
    EXPECT_GE(rec.best_epoch, 1u);
}

TEST(TrainScene, NodeOnlyModelReportsNoEdgeMetrics) {
    const auto test = train(tiny_scene_config(model::ModelKind::gcn)).record.report("test");
    EXPECT_TRUE(test.values.count("node_r1"));
    EXPECT_FALSE(test.values.count("edge_f1_1"));
    EXPECT_FALSE(test.values.count("triplet_r50"));
}

TEST(TrainScene, SingleInstanceScenesAreSkipped) {
    auto cfg = tiny_scene_config();
    auto splits = load_scene_splits(cfg);
    auto lonely = splits.train.front();
    lonely.node_labels.resize(1);
    lonely.edge_labels.clear();
    std::erase_if(lonely.instance, [](int id) { return id != 1; });
    lonely.points.resize(lonely.instance.size() * data::kPointChannels);
    splits.test.push_back(lonely);
    const auto rec = train_scene(cfg, splits).record;
    EXPECT_EQ(rec.report("test").count, cfg.synth_test);
}

TEST(TrainScene, SingleSceneOverfits) {
    ExperimentConfig cfg;
    cfg.task = Task::scene;
    cfg.epochs = 500;
    SceneSplits splits;
    data::SynthOptions o;
    o.seed = 17;
    splits.train = {data::generate_synthetic_scene(o)};
    splits.val = splits.train;
    const auto rec = train_scene(cfg, splits).record;
    double best = INFINITY;
    std::size_t reached = 0;
    for (const auto& e : rec.epochs) {
        best = std::min(best, e.val_score);
        if (!reached && e.val_score < 0.05) reached = e.epoch;
    }
    EXPECT_LT(best, 0.05);
    EXPECT_GT(reached, 0u);
}

// --- outputs ---------------------------------------------------------------

TEST(Outputs, WriteAndCollect) {
    const auto dir = datasets::scratch_dir("outputs");
    auto cfg = tiny_scene_config();
    cfg.repeat_count = 2;
    const auto results = run_repeats(cfg);
    write_outputs(results, dir);
    EXPECT_TRUE(fs::exists(dir / "summary.csv"));
    EXPECT_TRUE(fs::exists(dir / "checkpoint_1.json"));
    const auto runs = collect_runs(dir);
    ASSERT_EQ(runs.size(), 2u);
    EXPECT_TRUE(runs[0].same_result(results[0].record));
    const auto rows = report_rows(runs);
    ASSERT_EQ(rows.size(), 4u); // two runs, then mean and std
    EXPECT_EQ(rows[2].at("seed"), "mean");
    fs::remove_all(dir);
}
