#include "splitwalk/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>

#include "splitwalk/distributions.hpp"
#include "splitwalk/errors.hpp"
#include "splitwalk/simd/kernels.hpp"

namespace splitwalk {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

MixedDistribution parse_mixed(const json& j) {
    check_keys(j, {"type", "base", "continuous_weight", "atoms"}, "target");
    ContinuousBase base = UniformBase{};
    if (j.contains("base")) {
        const json& b = j.at("base");
        const std::string kind = b.at("kind").get<std::string>();
        if (kind == "uniform") {
            check_keys(b, {"kind", "lo", "hi"}, "target.base");
            base = UniformBase{b.value("lo", 0.0), b.value("hi", 1.0)};
        } else if (kind == "exponential") {
            check_keys(b, {"kind", "rate"}, "target.base");
            base = ExponentialBase{b.value("rate", 1.0)};
        } else {
            throw ConfigError("target.base.kind must be 'uniform' or 'exponential', got '" + kind + "'");
        }
    }
    std::vector<Atom> atoms;
    for (const json& a : j.value("atoms", json::array())) {
        check_keys(a, {"location", "mass"}, "target.atoms[]");
        atoms.push_back({a.at("location").get<double>(), a.at("mass").get<double>()});
    }
    try {
        return MixedDistribution(base, j.value("continuous_weight", 1.0), std::move(atoms));
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("target: ") + e.what());
    }
}

DiffusionConfig parse_diffusion(const json& j) {
    check_keys(j, {"type", "a", "b", "beta", "dt", "u0", "max_steps", "rejection_cap"}, "target");
    DiffusionConfig c;
    c.a = j.value("a", c.a);
    c.b = j.value("b", c.b);
    c.beta = j.value("beta", c.beta);
    c.dt = j.value("dt", c.dt);
    if (j.contains("u0")) {
        const auto u0 = j.at("u0").get<std::vector<double>>();
        if (u0.size() != 2) throw ConfigError("target.u0 must have two components");
        c.u0 = {u0[0], u0[1]};
    }
    c.max_steps = j.value("max_steps", c.max_steps);
    c.rejection_cap = j.value("rejection_cap", c.rejection_cap);
    try {
        c.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("target: ") + e.what());
    }
    return c;
}

ModeSet parse_modes(const json& j) {
    ModeSet m;
    for (const json& v : j) {
        const std::string s = v.get<std::string>();
        if (s == "Strict") {
            m.strict = true;
        } else if (s == "NonStrict") {
            m.nonstrict = true;
        } else if (s == "PurePoisson") {
            m.pure_poisson = true;
        } else {
            throw ConfigError("modes: unknown mode '" + s + "' (Strict, NonStrict, PurePoisson)");
        }
    }
    return m;
}

std::uint64_t batch_seed(std::uint64_t seed, std::uint64_t replication, std::uint64_t tag) {
    return mix64(seed ^ mix64(replication * 4 + tag));
}

constexpr std::uint64_t kNonStrictTag = 1;
constexpr std::uint64_t kStrictTag = 2;
constexpr std::uint64_t kReferenceTag = 3;

std::uint64_t total_draws(const std::vector<WalkRecord>& records) {
    std::uint64_t d = 0;
    for (const WalkRecord& r : records) d += r.draws;
    return d;
}

/// Walk visits per repeated score value, pooled over batches.
struct AtomTally {
    std::map<double, std::uint64_t> visits;
    std::uint64_t walks = 0;

    void add(const std::vector<WalkRecord>& records) {
        for (const auto& [value, v] : derive_strict_counts(records)) visits[value] += v;
        walks += records.size();
    }

    std::vector<double> deltas() const {
        std::vector<double> out;
        const double w = static_cast<double>(walks);
        for (const auto& [value, v] : visits) {
            out.push_back(std::max(1.0 - static_cast<double>(v) / w, 0.5 / w));
        }
        return out;
    }
};

struct ReplicationResult {
    std::vector<ReportRow> rows;
    std::optional<std::uint64_t> strict_total, nonstrict_total, pure_poisson_total;
};

class Runner {
public:
    explicit Runner(const ExperimentConfig& cfg) : cfg_(cfg), sampler_(make_sampler(cfg)) {}

    ReplicationResult replicate(std::uint64_t r) {
        const ModeSet& m = cfg_.modes;
        const bool derived = m.strict && cfg_.strict_source == StrictSource::Derived;
        const bool need_ns = m.nonstrict || m.pure_poisson || derived;
        const bool need_native = m.strict && !derived;
        ReplicationResult out;

        std::vector<WalkRecord> ns, st;
        double ns_ms = 0.0, st_ms = 0.0;
        if (need_native) {
            st = batch(WalkMode::Strict, batch_seed(cfg_.seed, r, kStrictTag), st_ms);
            tally_.add(st);
        }
        if (need_ns) {
            const WalkMode mode = m.pure_poisson ? WalkMode::NonStrictWithPurePoisson : WalkMode::NonStrict;
            ns = batch(mode, batch_seed(cfg_.seed, r, kNonStrictTag), ns_ms);
            if (!need_native) tally_.add(ns);
        }

        if (m.strict) {
            const std::vector<WalkRecord>& src = derived ? ns : st;
            const MergedStates merged = merge_states(src);
            RunLengthEncoding runs = rle(merged.merged);
            std::uint64_t total = merged.total_count;
            if (derived) {
                runs = with_strict_counts(runs, derive_strict_counts(ns));
                total = derived_strict_total(ns);
            }
            const EstimateReport e = estimate_strict(runs, cfg_.n);
            out.rows.push_back({r, EstimatorKind::StrictMVUE, e.p_hat, total, std::nullopt, total_draws(src),
                                derived ? ns_ms : st_ms});
            out.strict_total = total;
        }
        if (need_ns) {
            const MergedStates merged = merge_states(ns);
            if (m.nonstrict) {
                const EstimateReport e = estimate_nonstrict(rle(merged.merged), cfg_.n);
                out.rows.push_back({r, EstimatorKind::NonStrictMVUE, e.p_hat, merged.total_count,
                                    merged.total_pure_poisson, total_draws(ns), ns_ms});
            }
            if (m.pure_poisson) {
                const EstimateReport e = estimate_pure_poisson(*merged.total_pure_poisson, cfg_.n);
                out.rows.push_back({r, EstimatorKind::PurePoisson, e.p_hat, merged.total_count,
                                    merged.total_pure_poisson, total_draws(ns), ns_ms});
                out.pure_poisson_total = merged.total_pure_poisson;
            }
            out.nonstrict_total = merged.total_count;
        }
        return out;
    }

    const AtomTally& tally() const noexcept { return tally_; }

private:
    std::vector<WalkRecord> batch(WalkMode mode, std::uint64_t seed, double& ms) {
        const auto t0 = std::chrono::steady_clock::now();
        auto records = run_batch(*sampler_, cfg_.level, mode, static_cast<std::size_t>(cfg_.n), seed,
                                 cfg_.parallelism, cfg_.max_draws);
        if (cfg_.timing) {
            ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }
        return records;
    }

    const ExperimentConfig& cfg_;
    std::unique_ptr<ConditionalSampler> sampler_;
    AtomTally tally_;
};

/// Exact or supplied truth, else p from the replication means and Delta_d
/// from the pooled visit frequencies.
Truth resolve_truth(const ExperimentConfig& cfg, const std::vector<ReportRow>& rows, const AtomTally& tally) {
    if (auto t = known_truth(cfg)) return *t;
    std::map<EstimatorKind, std::pair<double, std::uint64_t>> sums;
    for (const ReportRow& row : rows) {
        sums[row.estimator].first += row.p_hat;
        ++sums[row.estimator].second;
    }
    double p = 0.0;
    for (EstimatorKind k : {EstimatorKind::NonStrictMVUE, EstimatorKind::PurePoisson, EstimatorKind::StrictMVUE}) {
        if (auto it = sums.find(k); it != sums.end()) {
            p = it->second.first / static_cast<double>(it->second.second);
            break;
        }
    }
    Truth t{p, tally.deltas(), p, false};
    for (double d : t.deltas) t.p_pois /= d;
    t.p_pois = std::min(t.p_pois, 1.0);
    return t;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (n < 2) throw ConfigError("N must be at least 2");
    if (replications < 1) throw ConfigError("replications must be at least 1");
    if (modes.size() == 0) throw ConfigError("mode set must not be empty");
    if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
    if (!std::isfinite(level)) throw ConfigError("level must be finite");
    if (max_draws < 1) throw ConfigError("max_draws must be positive");
    if (reference) {
        if (!(reference->p > 0.0 && reference->p <= 1.0)) throw ConfigError("reference.p must lie in (0, 1]");
        for (double d : reference->deltas) {
            if (!(d > 0.0 && d <= 1.0)) throw ConfigError("reference.deltas must lie in (0, 1]");
        }
    }
    if (const auto* s = std::get_if<SatTarget>(&target); s && s->sweeps < 0) {
        throw ConfigError("target.sweeps must be non-negative");
    }
}

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
    ExperimentConfig c;
    try {
        check_keys(j, {"target", "level", "N", "modes", "replications", "seed", "parallelism", "output",
                       "strict_source", "reference", "reference_samples", "max_draws", "timing"},
                   "config");
        const json& t = j.at("target");
        const std::string type = t.at("type").get<std::string>();
        if (type == "mixed") {
            c.target = MixedTarget{parse_mixed(t)};
        } else if (type == "diffusion") {
            c.target = parse_diffusion(t);
        } else if (type == "sat") {
            check_keys(t, {"type", "path", "sweeps"}, "target");
            std::filesystem::path p = t.at("path").get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            c.target = SatTarget{p, t.value("sweeps", 5)};
        } else {
            throw ConfigError("target.type must be 'mixed', 'diffusion' or 'sat', got '" + type + "'");
        }
        c.level = j.at("level").get<double>();
        c.n = j.value("N", c.n);
        if (j.contains("modes")) c.modes = parse_modes(j.at("modes"));
        c.replications = j.value("replications", c.replications);
        c.seed = j.value("seed", c.seed);
        c.parallelism = j.value("parallelism", c.parallelism);
        c.output = j.value("output", c.output.string());
        if (j.contains("strict_source")) {
            const std::string s = j.at("strict_source").get<std::string>();
            if (s == "native") {
                c.strict_source = StrictSource::Native;
            } else if (s == "derived") {
                c.strict_source = StrictSource::Derived;
            } else {
                throw ConfigError("strict_source must be 'native' or 'derived'");
            }
        }
        if (j.contains("reference")) {
            const json& r = j.at("reference");
            check_keys(r, {"p", "deltas"}, "reference");
            c.reference = ReferenceValues{r.at("p").get<double>(), r.value("deltas", std::vector<double>{})};
        }
        c.reference_samples = j.value("reference_samples", c.reference_samples);
        c.max_draws = j.value("max_draws", c.max_draws);
        c.timing = j.value("timing", c.timing);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config(j, path.parent_path());
}

std::unique_ptr<ConditionalSampler> make_sampler(const ExperimentConfig& cfg) {
    struct Visitor {
        std::unique_ptr<ConditionalSampler> operator()(const MixedTarget& t) const {
            return std::make_unique<MixedSampler>(t.dist);
        }
        std::unique_ptr<ConditionalSampler> operator()(const DiffusionConfig& d) const {
            return std::make_unique<DiffusionSampler>(d);
        }
        std::unique_ptr<ConditionalSampler> operator()(const SatTarget& s) const {
            return std::make_unique<SatSampler>(load_dimacs(s.path.string()), s.sweeps);
        }
    };
    return std::visit(Visitor{}, cfg.target);
}

std::optional<Truth> known_truth(const ExperimentConfig& cfg) {
    if (const auto* m = std::get_if<MixedTarget>(&cfg.target)) {
        const MixedTruth t = mixed_truth(m->dist, cfg.level);
        return Truth{t.p_x, t.deltas(), t.p_pois, true};
    }
    if (cfg.reference) {
        Truth t{cfg.reference->p, cfg.reference->deltas, cfg.reference->p, false};
        for (double d : t.deltas) t.p_pois /= d;
        t.p_pois = std::min(t.p_pois, 1.0);
        return t;
    }
    return std::nullopt;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RowSink& sink) {
    cfg.validate();
    Runner runner(cfg);
    ExperimentReport report;
    for (std::uint64_t r = 0; r < cfg.replications; ++r) {
        ReplicationResult res;
        try {
            res = runner.replicate(r);
        } catch (const std::exception& e) {
            throw ReplicationError(r, e.what());
        }
        for (const ReportRow& row : res.rows) {
            if (sink) sink(row);
            report.rows.push_back(row);
        }
    }
    report.truth = resolve_truth(cfg, report.rows, runner.tally());
    report.summaries = summarize(report.rows, cfg, report.truth);
    return report;
}

std::vector<EstimatorSummary> summarize(const std::vector<ReportRow>& rows, const ExperimentConfig& cfg,
                                        const std::optional<Truth>& truth) {
    std::vector<EstimatorSummary> out;
    for (EstimatorKind kind : {EstimatorKind::StrictMVUE, EstimatorKind::NonStrictMVUE, EstimatorKind::PurePoisson}) {
        EstimatorSummary s;
        s.estimator = kind;
        double sum = 0.0, count = 0.0, draws = 0.0;
        for (const ReportRow& row : rows) {
            if (row.estimator != kind) continue;
            ++s.replications;
            sum += row.p_hat;
            count += static_cast<double>(row.total_count);
            draws += static_cast<double>(row.conditional_draws);
        }
        if (s.replications == 0) continue;
        const double r = static_cast<double>(s.replications);
        s.mean = sum / r;
        s.mean_total_count = count / r;
        s.mean_conditional_draws = draws / r;
        // Two-pass variance.
        double ss = 0.0;
        for (const ReportRow& row : rows) {
            if (row.estimator == kind) ss += (row.p_hat - s.mean) * (row.p_hat - s.mean);
        }
        s.variance = s.replications > 1 ? ss / (r - 1.0) : 0.0;
        s.standard_error = std::sqrt(s.variance / r);
        s.cv = s.mean != 0.0 ? std::sqrt(s.variance) / s.mean : 0.0;

        if (truth && truth->p > 0.0) {
            switch (kind) {
                case EstimatorKind::StrictMVUE:
                    s.theoretical_variance = variance_strict(truth->p, truth->deltas, cfg.n);
                    break;
                case EstimatorKind::PurePoisson:
                    s.theoretical_variance = variance_continuous(truth->p, cfg.n);
                    break;
                case EstimatorKind::NonStrictMVUE:
                    if (truth->deltas.empty()) {
                        s.theoretical_variance = variance_continuous(truth->p, cfg.n);
                    } else if (cfg.n >= 3) {
                        s.variance_bounds =
                            variance_bounds_nonstrict(truth->p, truth->p_pois, truth->deltas.size(), cfg.n);
                    }
                    break;
                case EstimatorKind::CrudeMC: break;
            }
        }
        out.push_back(s);
    }
    return out;
}

HistogramReport run_histogram(const ExperimentConfig& cfg) {
    cfg.validate();
    Runner runner(cfg);
    HistogramReport h;
    std::vector<ReportRow> rows;
    for (std::uint64_t r = 0; r < cfg.replications; ++r) {
        ReplicationResult res;
        try {
            res = runner.replicate(r);
        } catch (const std::exception& e) {
            throw ReplicationError(r, e.what());
        }
        if (res.strict_total) h.strict_totals.push_back(*res.strict_total);
        if (cfg.modes.nonstrict) h.nonstrict_totals.push_back(*res.nonstrict_total);
        if (res.pure_poisson_total) h.pure_poisson_totals.push_back(*res.pure_poisson_total);
        rows.insert(rows.end(), res.rows.begin(), res.rows.end());
    }
    h.truth = resolve_truth(cfg, rows, runner.tally());
    if (!(h.truth.p > 0.0)) throw SamplingError("histogram: estimated p is 0, no expected counts available");

    std::uint64_t lo = std::numeric_limits<std::uint64_t>::max(), hi = 0;
    for (const auto* v : {&h.strict_totals, &h.nonstrict_totals, &h.pure_poisson_totals}) {
        for (std::uint64_t c : *v) {
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
    }
    const std::size_t n = static_cast<std::size_t>(cfg.n);
    const auto pmf = [&](const CountLawSpec& law) { return count_law_prefix(law, static_cast<std::size_t>(hi)); };
    const std::vector<double> e_strict = pmf(make_count_law(h.truth.p, h.truth.deltas, CountKind::Strict).batch(n));
    const std::vector<double> e_ns = pmf(make_count_law(h.truth.p, h.truth.deltas, CountKind::NonStrict).batch(n));
    const std::vector<double> e_pp =
        pmf(CountLawSpec{-static_cast<double>(cfg.n) * std::log(h.truth.p), {}, CountKind::NonStrict});
    const double reps = static_cast<double>(cfg.replications);

    const auto emit = [&](WalkMode mode, const std::vector<std::uint64_t>& totals) {
        if (totals.empty()) return;
        std::vector<std::uint64_t> observed(hi - lo + 1, 0);
        for (std::uint64_t c : totals) ++observed[c - lo];
        for (std::uint64_t k = lo; k <= hi; ++k) {
            h.rows.push_back({mode, k, observed[k - lo], reps * e_strict[k], reps * e_ns[k], reps * e_pp[k]});
        }
    };
    emit(WalkMode::Strict, h.strict_totals);
    emit(WalkMode::NonStrict, h.nonstrict_totals);
    emit(WalkMode::NonStrictWithPurePoisson, h.pure_poisson_totals);
    return h;
}

ReferenceReport run_reference(const ExperimentConfig& cfg, std::uint64_t samples) {
    if (samples == 0) throw UsageError("reference needs at least one sample");
    cfg.validate();
    const std::uint64_t key = batch_seed(cfg.seed, 0, kReferenceTag);
    std::vector<double> scores(static_cast<std::size_t>(samples));

    if (const auto* d = std::get_if<DiffusionConfig>(&cfg.target)) {
        const auto params = d->kernel_params();
        constexpr std::uint64_t kBlock = 4096;
        for (std::uint64_t first = 0; first < samples; first += kBlock) {
            const std::uint64_t len = std::min(kBlock, samples - first);
            simd::diffusion_scores(params, key, first, std::span<double>(scores.data() + first, len));
        }
    } else if (const auto* s = std::get_if<SatTarget>(&cfg.target)) {
        const SatProblem problem = load_dimacs(s->path.string());
        for (std::uint64_t i = 0; i < samples; ++i) {
            RngStream rng(key, i);
            scores[i] = static_cast<double>(count_satisfied(problem, random_assignment(problem.n, rng)));
        }
    } else {
        MixedSampler sampler(std::get<MixedTarget>(cfg.target).dist);
        for (std::uint64_t i = 0; i < samples; ++i) {
            RngStream rng(key, i);
            scores[i] = sampler.sample_initial(rng);
        }
    }

    std::vector<std::uint8_t> hits(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) hits[i] = scores[i] > cfg.level;
    ReferenceReport rep{samples, crude_monte_carlo(hits), {}};

    std::sort(scores.begin(), scores.end());
    const double total = static_cast<double>(samples);
    for (std::size_t i = 0; i < scores.size();) {
        std::size_t j = i;
        while (j < scores.size() && scores[j] == scores[i]) ++j;
        if (scores[i] > cfg.level) break;
        if (j - i >= 2) {
            const double at_least = static_cast<double>(scores.size() - i);
            const double greater = static_cast<double>(scores.size() - j);
            rep.atoms.push_back({scores[i], static_cast<double>(j - i) / total, greater / at_least});
        }
        i = j;
    }
    return rep;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_rows_header(std::ostream& out) {
    out << "replication,estimator,p_hat,total_count,pure_poisson_count,conditional_draws,wall_ms\n";
}

void write_row(std::ostream& out, const ReportRow& row) {
    out << row.replication << ',' << to_string(row.estimator) << ',' << format_double(row.p_hat) << ','
        << row.total_count << ',';
    if (row.pure_poisson_count) out << *row.pure_poisson_count;
    out << ',' << row.conditional_draws << ',' << format_double(row.wall_ms) << '\n';
}

void write_failure_row(std::ostream& out, std::uint64_t replication) {
    out << replication << ",FAILED,,,,,\n";
}

json summary_json(const ExperimentReport& report, const ExperimentConfig& cfg) {
    json j;
    j["level"] = cfg.level;
    j["N"] = cfg.n;
    j["replications"] = cfg.replications;
    j["seed"] = cfg.seed;
    if (report.truth) {
        j["truth"] = {{"p", report.truth->p},
                      {"deltas", report.truth->deltas},
                      {"p_pois", report.truth->p_pois},
                      {"exact", report.truth->exact}};
    }
    json list = json::array();
    for (const EstimatorSummary& s : report.summaries) {
        json e = {{"estimator", to_string(s.estimator)},
                  {"replications", s.replications},
                  {"mean", s.mean},
                  {"variance", s.variance},
                  {"standard_error", s.standard_error},
                  {"cv", s.cv},
                  {"mean_total_count", s.mean_total_count},
                  {"mean_conditional_draws", s.mean_conditional_draws}};
        if (s.theoretical_variance) e["theoretical_variance"] = *s.theoretical_variance;
        if (s.variance_bounds) {
            e["variance_bounds"] = {{"lower", s.variance_bounds->lower}, {"upper", s.variance_bounds->upper}};
        }
        list.push_back(std::move(e));
    }
    j["estimators"] = std::move(list);
    return j;
}

void write_histogram_csv(std::ostream& out, const HistogramReport& h) {
    out << "mode,count,observed,expected_strict,expected_nonstrict,expected_purepoisson\n";
    for (const HistogramRow& r : h.rows) {
        const char* mode = r.mode == WalkMode::Strict ? "Strict"
                           : r.mode == WalkMode::NonStrict ? "NonStrict"
                                                           : "PurePoisson";
        out << mode << ',' << r.count << ',' << r.observed << ',' << format_double(r.expected_strict) << ','
            << format_double(r.expected_nonstrict) << ',' << format_double(r.expected_purepoisson) << '\n';
    }
}

json reference_json(const ReferenceReport& r, const ExperimentConfig& cfg) {
    json atoms = json::array();
    for (const AtomEstimate& a : r.atoms) {
        atoms.push_back({{"location", a.location}, {"mass", a.mass}, {"delta", a.delta}});
    }
    return {{"level", cfg.level},
            {"samples", r.samples},
            {"p", r.p.p_hat},
            {"standard_error", r.p.standard_error.value_or(0.0)},
            {"atoms", std::move(atoms)}};
}

}  // namespace splitwalk
