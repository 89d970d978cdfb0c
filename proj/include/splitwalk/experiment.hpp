#pragma once

/// Replicated estimation runs, count histograms and crude Monte Carlo
/// references, driven by a JSON experiment config.
///
/// Output schemas:
///   rows.csv       replication,estimator,p_hat,total_count,pure_poisson_count,conditional_draws,wall_ms
///   summary.json   per-estimator mean / variance / CV plus theoretical references
///   histogram.csv  mode,count,observed,expected_strict,expected_nonstrict,expected_purepoisson
///   reference.json crude Monte Carlo estimate of p and of each visible atom ratio

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "splitwalk/estimators.hpp"
#include "splitwalk/targets/diffusion.hpp"
#include "splitwalk/targets/mixed.hpp"
#include "splitwalk/targets/sat.hpp"
#include "splitwalk/walk.hpp"

namespace splitwalk {

/// Invalid or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A target or walk error raised inside replication `replication()`.
class ReplicationError : public std::runtime_error {
public:
    ReplicationError(std::uint64_t replication, const std::string& what)
        : std::runtime_error("replication " + std::to_string(replication) + ": " + what),
          replication_(replication) {}

    std::uint64_t replication() const noexcept { return replication_; }

private:
    std::uint64_t replication_;
};

struct MixedTarget {
    MixedDistribution dist;
};

struct SatTarget {
    std::filesystem::path path;
    int sweeps = 5;
};

using TargetSpec = std::variant<MixedTarget, DiffusionConfig, SatTarget>;

struct ModeSet {
    bool strict = false;
    bool nonstrict = false;
    bool pure_poisson = false;

    std::size_t size() const noexcept { return strict + nonstrict + pure_poisson; }
};

enum class StrictSource { Native, Derived };

/// Known exceedance probability and atom ratios for targets without a
/// closed form (e.g. from a crude Monte Carlo reference run).
struct ReferenceValues {
    double p;
    std::vector<double> deltas;
};

struct ExperimentConfig {
    TargetSpec target = MixedTarget{MixedDistribution(UniformBase{}, 1.0, {})};
    double level = 0.0;
    std::uint64_t n = 100;
    ModeSet modes{true, true, true};
    std::uint64_t replications = 1;
    std::uint64_t seed = 1;
    std::size_t parallelism = 1;
    std::filesystem::path output = "out";
    StrictSource strict_source = StrictSource::Native;
    std::optional<ReferenceValues> reference;
    std::uint64_t reference_samples = 1'000'000;
    std::uint64_t max_draws = kDefaultMaxDraws;
    bool timing = true;  // false writes wall_ms = 0 for byte-stable output

    void validate() const;
};

/// `base_dir` resolves relative SAT paths. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

std::unique_ptr<ConditionalSampler> make_sampler(const ExperimentConfig& cfg);

struct ReportRow {
    std::uint64_t replication;
    EstimatorKind estimator;
    double p_hat;
    std::uint64_t total_count;
    std::optional<std::uint64_t> pure_poisson_count;
    std::uint64_t conditional_draws;
    double wall_ms;
};

struct EstimatorSummary {
    EstimatorKind estimator;
    std::uint64_t replications = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased, over replications
    double standard_error = 0.0;
    double cv = 0.0;
    double mean_total_count = 0.0;
    double mean_conditional_draws = 0.0;
    std::optional<double> theoretical_variance;
    std::optional<VarianceBounds> variance_bounds;
};

struct Truth {
    double p;
    std::vector<double> deltas;
    double p_pois;
    bool exact;  // closed form rather than supplied or estimated
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
    std::vector<EstimatorSummary> summaries;
    std::optional<Truth> truth;
};

/// Consumes rows as they are produced.
using RowSink = std::function<void(const ReportRow&)>;

/// Runs every replication. Replication r uses batch seeds derived from
/// (seed, r), so the report is reproducible from the seed alone. Errors are
/// rethrown as ReplicationError after earlier rows have reached the sink.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const RowSink& sink = {});

/// Recomputes the summaries from rows (plus theoretical references).
std::vector<EstimatorSummary> summarize(const std::vector<ReportRow>& rows, const ExperimentConfig& cfg,
                                        const std::optional<Truth>& truth);

std::optional<Truth> known_truth(const ExperimentConfig& cfg);

struct HistogramRow {
    WalkMode mode;  // Strict, NonStrict or NonStrictWithPurePoisson (pure-Poisson counts)
    std::uint64_t count;
    std::uint64_t observed;
    double expected_strict;
    double expected_nonstrict;
    double expected_purepoisson;
};

struct HistogramReport {
    std::vector<HistogramRow> rows;
    Truth truth;  // used for the expected columns
    /// Per-batch totals by mode, in replication order.
    std::vector<std::uint64_t> strict_totals, nonstrict_totals, pure_poisson_totals;
};

HistogramReport run_histogram(const ExperimentConfig& cfg);

struct AtomEstimate {
    double location;
    double mass;
    double delta;
};

struct ReferenceReport {
    std::uint64_t samples;
    EstimateReport p;
    std::vector<AtomEstimate> atoms;  // repeated score values <= level
};

/// Throws UsageError when samples == 0.
ReferenceReport run_reference(const ExperimentConfig& cfg, std::uint64_t samples);

// Serialization ------------------------------------------------------------

void write_rows_header(std::ostream& out);
void write_row(std::ostream& out, const ReportRow& row);
/// Marker row `<replication>,FAILED,,,,,` closing a partial rows file.
void write_failure_row(std::ostream& out, std::uint64_t replication);
nlohmann::json summary_json(const ExperimentReport& report, const ExperimentConfig& cfg);
void write_histogram_csv(std::ostream& out, const HistogramReport& h);
nlohmann::json reference_json(const ReferenceReport& r, const ExperimentConfig& cfg);

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

}  // namespace splitwalk
