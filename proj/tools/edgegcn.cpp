// Command-line front end: train, eval, gradcheck, synth, report.

#include "edgegcn/gradient_suite.hpp"
#include "edgegcn/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>

using namespace edgegcn;
namespace fs = std::filesystem;

namespace {

void print_report(const metrics::EvalReport& r) {
    std::cout << "  " << std::left << std::setw(6) << r.split << " n=" << r.count;
    for (const auto& [k, v] : r.values) std::cout << "  " << k << "=" << std::setprecision(4) << v;
    std::cout << '\n';
}

int cmd_train(const fs::path& config_path, const std::string& output) {
    auto cfg = harness::load_config(config_path);
    if (!output.empty()) cfg.output_dir = output;
    const auto results = harness::run_repeats(cfg);
    for (const auto& r : results) {
        std::cout << r.record.task << " " << r.record.model << " seed " << r.record.seed << " best epoch "
                  << r.record.best_epoch << " (" << std::setprecision(3) << r.record.wall_clock_seconds << " s)\n";
        for (const auto& rep : r.record.reports) print_report(rep);
    }
    if (!cfg.output_dir.empty()) {
        harness::write_outputs(results, cfg.output_dir);
        std::cout << "wrote " << cfg.output_dir.string() << '\n';
    }
    return 0;
}

int cmd_eval(const fs::path& checkpoint, const fs::path& data) {
    for (const auto& r : harness::evaluate_checkpoint(harness::load_checkpoint(checkpoint), data)) print_report(r);
    return 0;
}

int cmd_gradcheck(const std::string& module, std::size_t instances, std::uint64_t seed, double tolerance) {
    bool ok = true;
    for (const auto& r : model::run_gradient_suite(model::parse_grad_module(module), instances, seed)) {
        const bool pass = r.max_error < tolerance;
        ok = ok && pass;
        std::cout << std::left << std::setw(24) << r.layer << " max error " << std::scientific << std::setprecision(2)
                  << r.max_error << "  " << (pass ? "ok" : "FAIL") << '\n';
    }
    return ok ? 0 : 1;
}

int cmd_synth(data::SynthOptions options, std::size_t count, const fs::path& out) {
    const auto first = options.seed;
    for (std::size_t k = 0; k < count; ++k) {
        options.seed = first + k;
        char name[32];
        std::snprintf(name, sizeof name, "scene_%05zu", k);
        data::write_scene(data::generate_synthetic_scene(options), out / name);
    }
    std::cout << "wrote " << count << " scenes to " << out.string() << '\n';
    return 0;
}

int cmd_report(const fs::path& runs, const std::string& output) {
    const auto records = harness::collect_runs(runs);
    if (records.empty()) throw std::runtime_error("no run_*.json files under " + runs.string());
    const fs::path path = output.empty() ? runs / "report.csv" : fs::path(output);
    metrics::write_reports_csv(path, harness::report_rows(records));
    std::cout << std::ifstream(path).rdbuf();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"EdgeGCN scene-graph reasoning: training, evaluation and diagnostics"};
    app.require_subcommand(1);

    fs::path config_path;
    std::string train_out;
    auto* train = app.add_subcommand("train", "Train repeat_count seeds from a config file");
    train->add_option("--config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
    train->add_option("--output", train_out, "Override output_dir");

    fs::path checkpoint, data_path;
    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
    eval->add_option("--checkpoint", checkpoint, "checkpoint_<seed>.json")->required()->check(CLI::ExistingFile);
    eval->add_option("--data", data_path, "Bundle directory, JSON-lines file or scene directory")->required()->check(CLI::ExistingPath);

    std::string module = "all";
    std::size_t instances = 20;
    std::uint64_t grad_seed = 0;
    double tolerance = 1e-4;
    auto* grad = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
    grad->add_option("--module", module, "all, edgegcn, backbone or heads")
        ->check(CLI::IsMember({"all", "edgegcn", "backbone", "heads"}));
    grad->add_option("--instances", instances, "Random scenes per layer")->check(CLI::PositiveNumber);
    grad->add_option("--seed", grad_seed);
    grad->add_option("--tolerance", tolerance);

    data::SynthOptions synth_opts;
    std::size_t count = 1;
    fs::path synth_out;
    auto* synth = app.add_subcommand("synth", "Write synthetic scenes with rule-derived predicates");
    synth->add_option("--seed", synth_opts.seed, "Seed of the first scene; scene k uses seed + k")->required();
    synth->add_option("--count", count)->required()->check(CLI::PositiveNumber);
    synth->add_option("--out", synth_out)->required();
    synth->add_option("--min-instances", synth_opts.min_instances)->capture_default_str();
    synth->add_option("--max-instances", synth_opts.max_instances)->capture_default_str();
    synth->add_option("--object-classes", synth_opts.num_object_classes)->capture_default_str();
    synth->add_option("--predicate-classes", synth_opts.num_predicate_classes)->capture_default_str();
    synth->add_option("--points-per-instance", synth_opts.points_per_instance)->capture_default_str();

    fs::path runs;
    std::string report_out;
    auto* report = app.add_subcommand("report", "Aggregate run records into a CSV table");
    report->add_option("--runs", runs, "Directory searched for run_*.json")->required()->check(CLI::ExistingDirectory);
    report->add_option("--out", report_out, "CSV path (default <runs>/report.csv)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*train) return cmd_train(config_path, train_out);
        if (*eval) return cmd_eval(checkpoint, data_path);
        if (*grad) return cmd_gradcheck(module, instances, grad_seed, tolerance);
        if (*synth) return cmd_synth(synth_opts, count, synth_out);
        if (*report) return cmd_report(runs, report_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
