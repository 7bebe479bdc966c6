#include "swarmstat/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "swarmstat/benchmarks.hpp"
#include "swarmstat/csv.hpp"
#include "swarmstat/errors.hpp"
#include "swarmstat/stats.hpp"
#include "swarmstat/version.hpp"

namespace swarmstat::experiment {

namespace {

int algorithm_rank(Algorithm a) {
    switch (a) {
    case Algorithm::cso_ma: return 0;
    case Algorithm::cso: return 1;
    case Algorithm::pso: return 2;
    }
    return 0;
}

} // namespace

unsigned thread_cap() {
    if (const char* env = std::getenv("SWARMSTAT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

ComparisonReport run_experiment(const Experiment& exp, const Objective& objective,
                                const SearchSpace& space) {
    if (exp.runs < 1) throw ConfigError("experiment: runs must be >= 1");
    if (exp.algorithms.empty()) throw ConfigError("experiment: no algorithms selected");

    struct Job {
        Algorithm algorithm;
        int run;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const Algorithm a : exp.algorithms)
        for (int r = 0; r < exp.runs; ++r)
            jobs.push_back({a, r,
                            exp.config.seed +
                                static_cast<std::uint64_t>(algorithm_rank(a)) * 1000000ULL +
                                static_cast<std::uint64_t>(r)});

    std::vector<RunRecord> records(jobs.size());
    const unsigned workers =
        std::min<unsigned>(thread_cap(), static_cast<unsigned>(jobs.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            OptConfig cfg = exp.config;
            cfg.seed = jobs[i].seed;
            cfg.algorithm = jobs[i].algorithm;
            cfg.record_trace = false;
            const OptResult res = minimize(objective, space, cfg);
            records[i] = {jobs[i].algorithm, jobs[i].run, jobs[i].seed,
                          res.best_value,    res.evals_used, res.elapsed_seconds};
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    ComparisonReport report;
    report.objective_id = exp.objective_id.empty() ? objective.name() : exp.objective_id;
    report.dim = exp.dim ? exp.dim : space.dim();
    report.base_seed = exp.config.seed;
    report.tool_version = kVersion;
    report.runs = std::move(records);
    summarize(report);
    return report;
}

ComparisonReport run_experiment(const Experiment& exp) {
    const auto spec = bench::make_benchmark(exp.objective_id, exp.dim);
    return run_experiment(exp, spec.objective, spec.space);
}

void summarize(ComparisonReport& report) {
    report.summary.clear();
    std::map<Algorithm, std::vector<double>> values;
    std::map<Algorithm, std::vector<double>> elapsed;
    for (const auto& r : report.runs) {
        values[r.algorithm].push_back(r.best_value);
        elapsed[r.algorithm].push_back(r.elapsed_s);
    }
    for (const auto& [algo, vals] : values) {
        AlgorithmSummary s;
        stats::RunningStats rs, re;
        for (const double v : vals) rs.add(v);
        for (const double e : elapsed[algo]) re.add(e);
        s.mean = rs.mean();
        s.sd = rs.sd();
        s.median = stats::median(vals);
        s.elapsed_mean = re.mean();
        s.elapsed_sd = re.sd();
        if (algo != Algorithm::cso_ma && values.count(Algorithm::cso_ma) &&
            vals.size() > 1)
            s.p_vs_cso_ma = stats::wilcoxon_rank_sum(values[Algorithm::cso_ma], vals);
        report.summary[algo] = s;
    }
}

Format format_from_string(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw ConfigError("unknown output format: " + s);
}

std::string to_csv(const ComparisonReport& report) {
    std::ostringstream os;
    os << "algorithm,run,seed,best_value,evals,elapsed_s\n";
    for (const auto& r : report.runs)
        os << to_string(r.algorithm) << "," << r.run << "," << r.seed << ","
           << csv::format_double(r.best_value) << "," << r.evals << ","
           << csv::format_double(r.elapsed_s) << "\n";
    return os.str();
}

std::string to_json(const ComparisonReport& report) {
    nlohmann::json j;
    j["objective"] = report.objective_id;
    j["dim"] = report.dim;
    j["base_seed"] = report.base_seed;
    j["tool_version"] = report.tool_version;
    j["runs"] = nlohmann::json::array();
    for (const auto& r : report.runs) {
        j["runs"].push_back({{"algorithm", to_string(r.algorithm)},
                             {"run", r.run},
                             {"seed", r.seed},
                             {"best_value", r.best_value},
                             {"evals", r.evals},
                             {"elapsed_s", r.elapsed_s}});
    }
    j["summary"] = nlohmann::json::object();
    for (const auto& [algo, s] : report.summary) {
        nlohmann::json js = {{"mean", s.mean},
                             {"sd", s.sd},
                             {"median", s.median},
                             {"elapsed_mean", s.elapsed_mean},
                             {"elapsed_sd", s.elapsed_sd}};
        if (s.p_vs_cso_ma)
            js["p_vs_cso_ma"] = *s.p_vs_cso_ma;
        else
            js["p_vs_cso_ma"] = nullptr;
        j["summary"][to_string(algo)] = js;
    }
    return j.dump(2) + "\n";
}

void emit(const ComparisonReport& report, const std::string& path, Format format) {
    csv::write_file_atomic(path, format == Format::csv ? to_csv(report)
                                                       : to_json(report));
}

ComparisonReport from_csv(const std::string& text) {
    const auto table = csv::parse(text, true);
    const std::vector<std::string> expected = {"algorithm", "run",   "seed",
                                               "best_value", "evals", "elapsed_s"};
    if (table.header != expected) throw DomainError("report csv: unexpected header");
    ComparisonReport report;
    report.tool_version = kVersion;
    for (const auto& row : table.rows) {
        RunRecord r;
        r.algorithm = algorithm_from_string(row.at(0));
        r.run = static_cast<int>(*csv::to_number(row.at(1)));
        r.seed = static_cast<std::uint64_t>(*csv::to_number(row.at(2)));
        r.best_value = *csv::to_number(row.at(3));
        r.evals = static_cast<std::uint64_t>(*csv::to_number(row.at(4)));
        r.elapsed_s = *csv::to_number(row.at(5));
        report.runs.push_back(r);
    }
    if (!report.runs.empty()) {
        std::uint64_t min_seed = report.runs.front().seed;
        for (const auto& r : report.runs) min_seed = std::min(min_seed, r.seed);
        report.base_seed = min_seed;
    }
    summarize(report);
    return report;
}

ComparisonReport from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    ComparisonReport report;
    report.objective_id = j.at("objective").get<std::string>();
    report.dim = j.at("dim").get<std::size_t>();
    report.base_seed = j.at("base_seed").get<std::uint64_t>();
    report.tool_version = j.at("tool_version").get<std::string>();
    for (const auto& rj : j.at("runs")) {
        RunRecord r;
        r.algorithm = algorithm_from_string(rj.at("algorithm").get<std::string>());
        r.run = rj.at("run").get<int>();
        r.seed = rj.at("seed").get<std::uint64_t>();
        r.best_value = rj.at("best_value").get<double>();
        r.evals = rj.at("evals").get<std::uint64_t>();
        r.elapsed_s = rj.at("elapsed_s").get<double>();
        report.runs.push_back(r);
    }
    summarize(report);
    return report;
}

ComparisonReport load(const std::string& path, Format format) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return format == Format::csv ? from_csv(buf.str()) : from_json(buf.str());
}

} // namespace swarmstat::experiment
