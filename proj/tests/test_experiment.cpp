#include <doctest.h>

#include <cmath>
#include <sstream>

#include "splitwalk/errors.hpp"
#include "splitwalk/experiment.hpp"
#include "splitwalk/oracles.hpp"

using namespace splitwalk;
using nlohmann::json;

namespace {

json mixture_config() {
    return json::parse(R"({
        "target": {"type": "mixed", "base": {"kind": "uniform", "lo": 0, "hi": 1},
                   "continuous_weight": 0.7, "atoms": [{"location": 0.5, "mass": 0.3}]},
        "level": 0.9, "N": 100, "modes": ["Strict", "NonStrict", "PurePoisson"],
        "replications": 50, "seed": 11, "timing": false
    })");
}

std::string rows_text(const ExperimentReport& r) {
    std::ostringstream out;
    write_rows_header(out);
    for (const ReportRow& row : r.rows) write_row(out, row);
    return out.str();
}

}  // namespace

TEST_CASE("config parsing") {
    const ExperimentConfig c = parse_config(mixture_config());
    CHECK(c.n == 100);
    CHECK(c.modes.size() == 3);
    CHECK(std::holds_alternative<MixedTarget>(c.target));

    json bad = mixture_config();
    bad["N"] = 1;
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    bad = mixture_config();
    bad["modes"] = json::array();
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    bad = mixture_config();
    bad["modes"] = {"Sideways"};
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    bad = mixture_config();
    bad["replications"] = 0;
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    bad = mixture_config();
    bad["surprise"] = 1;
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    bad = mixture_config();
    bad["target"]["continuous_weight"] = 0.2;
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    bad = mixture_config();
    bad["level"] = "high";
    CHECK_THROWS_AS(parse_config(bad), ConfigError);

    const ExperimentConfig d = parse_config(json::parse(R"({"target": {"type": "diffusion", "dt": 0.5}, "level": 1})"));
    CHECK(std::get<DiffusionConfig>(d.target).dt == 0.5);
    const ExperimentConfig s =
        parse_config(json::parse(R"({"target": {"type": "sat", "path": "f.cnf"}, "level": 39})"), "/data");
    CHECK(std::get<SatTarget>(s.target).path == std::filesystem::path("/data/f.cnf"));
    CHECK(std::get<SatTarget>(s.target).sweeps == 5);
}

TEST_CASE("minimal run emits one row per mode") {
    json j = mixture_config();
    j["N"] = 2;
    j["replications"] = 1;
    for (const auto& modes : {json{"Strict"}, json{"NonStrict", "PurePoisson"}, json{"Strict", "NonStrict", "PurePoisson"}}) {
        j["modes"] = modes;
        const ExperimentReport r = run_experiment(parse_config(j));
        CHECK(r.rows.size() == modes.size());
    }
}

TEST_CASE("reports are reproducible and independent of parallelism") {
    json j = mixture_config();
    const ExperimentReport a = run_experiment(parse_config(j));
    j["parallelism"] = 4;
    const ExperimentReport b = run_experiment(parse_config(j));
    CHECK(rows_text(a) == rows_text(b));
    CHECK(summary_json(a, parse_config(j)).dump() == summary_json(b, parse_config(j)).dump());
    j["seed"] = 12;
    CHECK(rows_text(run_experiment(parse_config(j))) != rows_text(a));
}

TEST_CASE("rows stream through the sink in order") {
    const ExperimentConfig c = parse_config(mixture_config());
    std::vector<ReportRow> seen;
    const ExperimentReport r = run_experiment(c, [&](const ReportRow& row) { seen.push_back(row); });
    REQUIRE(seen.size() == 150);
    CHECK(seen.front().estimator == EstimatorKind::StrictMVUE);
    CHECK(seen[1].estimator == EstimatorKind::NonStrictMVUE);
    CHECK(seen[2].estimator == EstimatorKind::PurePoisson);
    CHECK(seen.back().replication == 49);
    CHECK(seen[2].pure_poisson_count.has_value());
    CHECK_FALSE(seen[0].pure_poisson_count.has_value());
}

TEST_CASE("summary is recomputable from the rows") {
    const ExperimentConfig c = parse_config(mixture_config());
    const ExperimentReport r = run_experiment(c);
    const auto again = summarize(r.rows, c, r.truth);
    REQUIRE(again.size() == r.summaries.size());
    for (std::size_t i = 0; i < again.size(); ++i) {
        CHECK(again[i].mean == r.summaries[i].mean);
        CHECK(std::fabs(again[i].variance - r.summaries[i].variance) <= 1e-12 * r.summaries[i].variance);
    }
    REQUIRE(r.truth.has_value());
    CHECK(r.truth->exact);
    CHECK(r.summaries[0].theoretical_variance.has_value());
    CHECK(r.summaries[1].variance_bounds.has_value());
    CHECK(r.summaries[2].theoretical_variance.has_value());

    // Recompute from the serialized text as well.
    std::istringstream in(rows_text(r));
    std::string line;
    std::getline(in, line);
    double sum = 0.0;
    int count = 0;
    while (std::getline(in, line)) {
        if (line.find(",NonStrictMVUE,") == std::string::npos) continue;
        const auto a = line.find(',', line.find(',') + 1);
        sum += std::stod(line.substr(a + 1, line.find(',', a + 1) - a - 1));
        ++count;
    }
    CHECK(std::fabs(sum / count - r.summaries[1].mean) <= 1e-12 * r.summaries[1].mean);
}

TEST_CASE("derived strict counts come from the non-strict batch") {
    json j = mixture_config();
    j["strict_source"] = "derived";
    const ExperimentReport r = run_experiment(parse_config(j));
    for (std::size_t i = 0; i < r.rows.size(); i += 3) {
        const ReportRow& st = r.rows[i];
        const ReportRow& ns = r.rows[i + 1];
        REQUIRE(st.estimator == EstimatorKind::StrictMVUE);
        CHECK(st.total_count <= ns.total_count);
        CHECK(st.conditional_draws == ns.conditional_draws);
    }
}

TEST_CASE("failures carry the replication index") {
    json j = mixture_config();
    // All mass at the top of the support: non-strict walks never leave.
    j["target"] = json::parse(R"({"type": "mixed", "continuous_weight": 0.5, "atoms": [{"location": 1.0, "mass": 0.5}]})");
    j["level"] = 1.0;
    j["modes"] = {"NonStrict"};
    j["max_draws"] = 1000;
    std::size_t rows = 0;
    try {
        run_experiment(parse_config(j), [&](const ReportRow&) { ++rows; });
        FAIL("expected a failure");
    } catch (const ReplicationError& e) {
        CHECK(e.replication() == 0);
        CHECK(rows == 0);
    }
    std::ostringstream out;
    write_failure_row(out, 3);
    CHECK(out.str() == "3,FAILED,,,,,\n");
}

TEST_CASE("histogram columns match the count laws") {
    json j = mixture_config();
    j["replications"] = 3000;
    const ExperimentConfig c = parse_config(j);
    const HistogramReport h = run_histogram(c);
    CHECK(h.strict_totals.size() == 3000);
    CHECK(h.nonstrict_totals.size() == 3000);
    CHECK(h.pure_poisson_totals.size() == 3000);
    double obs = 0.0;
    double exp_pp = 0.0;
    for (const HistogramRow& r : h.rows) {
        if (r.mode == WalkMode::NonStrictWithPurePoisson) {
            obs += static_cast<double>(r.observed);
            exp_pp += r.expected_purepoisson;
        }
    }
    CHECK(obs == 3000.0);
    CHECK(exp_pp == doctest::Approx(3000.0).epsilon(1e-3));
    const auto law = make_count_law(0.07, h.truth.deltas, CountKind::NonStrict).batch(100);
    CHECK(chisq_gof(h.nonstrict_totals, law).p_value > 0.01);

    std::ostringstream out;
    write_histogram_csv(out, h);
    CHECK(out.str().rfind("mode,count,observed,expected_strict,expected_nonstrict,expected_purepoisson\n", 0) == 0);
}

TEST_CASE("pure-Poisson mean count") {
    json j = mixture_config();
    j["replications"] = 2000;
    j["modes"] = {"PurePoisson"};
    const HistogramReport h = run_histogram(parse_config(j));
    double mean = 0.0;
    for (auto m : h.pure_poisson_totals) mean += static_cast<double>(m);
    mean /= 2000.0;
    const double lambda = -100.0 * std::log(0.07);
    CHECK(std::fabs(mean - lambda) < 4.0 * std::sqrt(lambda / 2000.0));
}

TEST_CASE("reference run") {
    const ExperimentConfig c = parse_config(mixture_config());
    CHECK_THROWS_AS(run_reference(c, 0), UsageError);
    const ReferenceReport r = run_reference(c, 200000);
    CHECK(std::fabs(r.p.p_hat - 0.07) < 4.0 * *r.p.standard_error);
    REQUIRE(r.atoms.size() == 1);
    CHECK(r.atoms[0].location == 0.5);
    const double se = std::sqrt((7.0 / 13.0) * (6.0 / 13.0) / (200000 * 0.13));
    CHECK(std::fabs(r.atoms[0].delta - 7.0 / 13.0) < 4.0 * se);
    const json j = reference_json(r, c);
    CHECK(j.at("samples") == 200000);
}

TEST_CASE("estimated references when no closed form exists") {
    const ExperimentConfig c = parse_config(json::parse(R"({
        "target": {"type": "diffusion"}, "level": 1.0, "N": 50, "replications": 20, "seed": 2, "timing": false
    })"));
    const ExperimentReport r = run_experiment(c);
    REQUIRE(r.truth.has_value());
    CHECK_FALSE(r.truth->exact);
    REQUIRE(r.truth->deltas.size() == 1);
    CHECK(r.truth->deltas[0] == doctest::Approx(0.396).epsilon(0.1));
}

TEST_CASE("double formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 5.977e-20, 0.0, 276.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.5) == "0.5");
}
