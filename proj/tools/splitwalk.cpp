#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "splitwalk/errors.hpp"
#include "splitwalk/experiment.hpp"

namespace fs = std::filesystem;
using namespace splitwalk;

namespace {

constexpr int kConfigExit = 2;
constexpr int kRuntimeExit = 3;

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

int cmd_run(const ExperimentConfig& cfg) {
    auto rows = open_output(cfg.output / "rows.csv");
    write_rows_header(rows);
    try {
        const ExperimentReport report = run_experiment(cfg, [&](const ReportRow& row) {
            write_row(rows, row);
        });
        rows.flush();
        write_json(cfg.output / "summary.json", summary_json(report, cfg));
    } catch (const ReplicationError& e) {
        write_failure_row(rows, e.replication());
        rows.flush();
        throw;
    }
    return 0;
}

int cmd_histogram(const ExperimentConfig& cfg) {
    const HistogramReport h = run_histogram(cfg);
    auto out = open_output(cfg.output / "histogram.csv");
    write_histogram_csv(out, h);
    return 0;
}

int cmd_reference(const ExperimentConfig& cfg, std::uint64_t samples) {
    const ReferenceReport r = run_reference(cfg, samples);
    write_json(cfg.output / "reference.json", reference_json(r, cfg));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rare-event probability estimation with increasing random walks"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> parallelism;
    std::optional<std::uint64_t> samples;
    bool no_timing = false;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON experiment config")->required();
        sub->add_option("--seed", seed, "Override the config seed");
        sub->add_option("--out", out_dir, "Override the output directory");
        sub->add_option("--parallelism", parallelism, "Worker threads per batch")->check(CLI::PositiveNumber);
        sub->add_flag("--no-timing", no_timing, "Write wall_ms = 0 for byte-stable output");
    };
    CLI::App* run = app.add_subcommand("run", "Replicated estimation: rows.csv and summary.json");
    CLI::App* hist = app.add_subcommand("histogram", "Per-batch count histogram: histogram.csv");
    CLI::App* ref = app.add_subcommand("reference", "Crude Monte Carlo reference: reference.json");
    add_common(run);
    add_common(hist);
    add_common(ref);
    ref->add_option("--samples", samples, "Unconditional samples (default: config reference_samples)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigExit;
    }

    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (out_dir) cfg.output = *out_dir;
        if (parallelism) cfg.parallelism = *parallelism;
        if (no_timing) cfg.timing = false;
        cfg.validate();
        fs::create_directories(cfg.output);
        // Surfaces an unreadable or malformed DIMACS file as a config error.
        if (std::holds_alternative<SatTarget>(cfg.target)) (void)make_sampler(cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigExit;
    }

    try {
        if (run->parsed()) return cmd_run(cfg);
        if (hist->parsed()) return cmd_histogram(cfg);
        return cmd_reference(cfg, samples.value_or(cfg.reference_samples));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeExit;
    }
}
