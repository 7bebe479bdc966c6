#include <doctest.h>

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "swarmstat/errors.hpp"
#include "swarmstat/experiment.hpp"
#include "swarmstat/stats.hpp"

using namespace swarmstat;
using namespace swarmstat::experiment;

namespace {

Experiment small_experiment(int runs) {
    Experiment e;
    e.objective_id = "sphere";
    e.dim = 3;
    e.runs = runs;
    e.config.swarm_size = 8;
    e.config.max_evals = 600;
    e.config.seed = 123;
    e.config.tolerance = 0.0;
    return e;
}

// minimal structural validator for the shipped report schema: checks types of
// required properties, recursing one level into arrays/objects
void check_against_schema(const nlohmann::json& schema, const nlohmann::json& doc) {
    REQUIRE(schema.contains("required"));
    for (const auto& key : schema["required"]) {
        REQUIRE_MESSAGE(doc.contains(key.get<std::string>()),
                        "missing key ", key.get<std::string>());
    }
    for (const auto& [key, prop] : schema["properties"].items()) {
        if (!doc.contains(key)) continue;
        const std::string type = prop.at("type").get<std::string>();
        const auto& v = doc.at(key);
        if (type == "string") CHECK(v.is_string());
        if (type == "integer") CHECK(v.is_number_integer());
        if (type == "number") CHECK(v.is_number());
        if (type == "object") CHECK(v.is_object());
        if (type == "array") {
            CHECK(v.is_array());
            if (prop.contains("items") && prop["items"].contains("required"))
                for (const auto& item : v) check_against_schema(prop["items"], item);
        }
    }
}

} // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("thirty runs times three algorithms persist ninety raw rows") {
    const ComparisonReport report = run_experiment(small_experiment(30));
    CHECK(report.runs.size() == 90);
    CHECK(report.summary.size() == 3);
    // seed schedule: base + rank * 1e6 + run
    for (const auto& r : report.runs) {
        const std::uint64_t rank = (r.algorithm == Algorithm::cso_ma) ? 0
                                   : (r.algorithm == Algorithm::cso)  ? 1
                                                                      : 2;
        CHECK(r.seed == 123 + rank * 1000000ULL + static_cast<std::uint64_t>(r.run));
    }
    CHECK(report.summary.at(Algorithm::cso).p_vs_cso_ma.has_value());
    CHECK_FALSE(report.summary.at(Algorithm::cso_ma).p_vs_cso_ma.has_value());
}

TEST_CASE("single-run experiments report zero sd and no p-values") {
    const ComparisonReport report = run_experiment(small_experiment(1));
    CHECK(report.runs.size() == 3);
    for (const auto& [algo, s] : report.summary) {
        CHECK(s.sd == 0.0);
        CHECK_FALSE(s.p_vs_cso_ma.has_value());
    }
}

TEST_CASE("re-running with the same base seed reproduces every value bit-exactly") {
    const ComparisonReport a = run_experiment(small_experiment(5));
    const ComparisonReport b = run_experiment(small_experiment(5));
    REQUIRE(a.runs.size() == b.runs.size());
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        CHECK(a.runs[i].best_value == b.runs[i].best_value);
        CHECK(a.runs[i].evals == b.runs[i].evals);
        CHECK(a.runs[i].seed == b.runs[i].seed);
    }
}

TEST_CASE("summary stats match an independent two-pass computation") {
    const ComparisonReport report = run_experiment(small_experiment(12));
    std::map<Algorithm, std::vector<double>> values;
    for (const auto& r : report.runs) values[r.algorithm].push_back(r.best_value);
    for (const auto& [algo, vals] : values) {
        double m = 0.0;
        for (const double v : vals) m += v;
        m /= static_cast<double>(vals.size());
        double ss = 0.0;
        for (const double v : vals) ss += (v - m) * (v - m);
        const double sd = std::sqrt(ss / static_cast<double>(vals.size() - 1));
        CHECK(report.summary.at(algo).mean == doctest::Approx(m).epsilon(1e-12));
        CHECK(report.summary.at(algo).sd == doctest::Approx(sd).epsilon(1e-12));
    }
}

TEST_CASE("csv round trip reproduces the report bit-exactly") {
    const ComparisonReport report = run_experiment(small_experiment(6));
    const std::string text = to_csv(report);
    CHECK(text.rfind("algorithm,run,seed,best_value,evals,elapsed_s\n", 0) == 0);
    const ComparisonReport back = from_csv(text);
    REQUIRE(back.runs.size() == report.runs.size());
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
        CHECK(back.runs[i].algorithm == report.runs[i].algorithm);
        CHECK(back.runs[i].best_value == report.runs[i].best_value);
        CHECK(back.runs[i].elapsed_s == report.runs[i].elapsed_s);
        CHECK(back.runs[i].seed == report.runs[i].seed);
    }
    for (const auto& [algo, s] : report.summary) {
        CHECK(back.summary.at(algo).mean == s.mean);
        CHECK(back.summary.at(algo).sd == s.sd);
        CHECK(back.summary.at(algo).median == s.median);
        if (s.p_vs_cso_ma)
            CHECK(*back.summary.at(algo).p_vs_cso_ma == *s.p_vs_cso_ma);
    }
}

TEST_CASE("json round trip and schema validation") {
    const ComparisonReport report = run_experiment(small_experiment(4));
    const std::string text = to_json(report);
    const ComparisonReport back = from_json(text);
    CHECK(back.base_seed == report.base_seed);
    CHECK(back.objective_id == report.objective_id);
    CHECK(back.tool_version == report.tool_version);
    REQUIRE(back.runs.size() == report.runs.size());
    for (std::size_t i = 0; i < report.runs.size(); ++i)
        CHECK(back.runs[i].best_value == report.runs[i].best_value);

    std::ifstream schema_file(std::string(SWARMSTAT_DATA_DIR) + "/report.schema.json");
    REQUIRE(schema_file.good());
    nlohmann::json schema;
    schema_file >> schema;
    check_against_schema(schema, nlohmann::json::parse(text));
}

TEST_CASE("emit writes atomically and load reads back") {
    const ComparisonReport report = run_experiment(small_experiment(3));
    const std::string path = "report_test.json";
    emit(report, path, Format::json);
    const ComparisonReport back = load(path, Format::json);
    CHECK(back.runs.size() == report.runs.size());
    std::remove(path.c_str());

    const std::string csv_path = "report_test.csv";
    emit(report, csv_path, Format::csv);
    const ComparisonReport csv_back = load(csv_path, Format::csv);
    CHECK(csv_back.runs.size() == report.runs.size());
    std::remove(csv_path.c_str());
}

TEST_CASE("unknown objective ids are configuration errors") {
    Experiment e = small_experiment(2);
    e.objective_id = "nonesuch";
    CHECK_THROWS_AS(run_experiment(e), ConfigError);
}

TEST_SUITE_END();
