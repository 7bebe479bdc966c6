#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swarmstat/objective.hpp"
#include "swarmstat/optimizer.hpp"
#include "swarmstat/search_space.hpp"

namespace swarmstat::experiment {

struct Experiment {
    std::string objective_id; // registry key, e.g. "ackley"
    std::size_t dim = 10;
    std::vector<Algorithm> algorithms = {Algorithm::cso_ma, Algorithm::cso,
                                         Algorithm::pso};
    int runs = 30;
    OptConfig config; // template; seed acts as the base seed
};

struct RunRecord {
    Algorithm algorithm = Algorithm::cso_ma;
    int run = 0;
    std::uint64_t seed = 0;
    double best_value = 0.0;
    std::uint64_t evals = 0;
    double elapsed_s = 0.0;
};

struct AlgorithmSummary {
    double mean = 0.0;
    double sd = 0.0;
    double median = 0.0;
    double elapsed_mean = 0.0;
    double elapsed_sd = 0.0;
    std::optional<double> p_vs_cso_ma; // absent for cso-ma itself or runs == 1
};

struct ComparisonReport {
    std::string objective_id;
    std::size_t dim = 0;
    std::uint64_t base_seed = 0;
    std::string tool_version;
    std::vector<RunRecord> runs;
    std::map<Algorithm, AlgorithmSummary> summary;
};

/// Seed schedule: run r of algorithm a uses base_seed + a*10^6 + r, so the
/// per-algorithm samples are independent yet bit-reproducible. Runs may
/// execute in parallel, capped by the SWARMSTAT_THREADS environment variable.
ComparisonReport run_experiment(const Experiment& exp, const Objective& objective,
                                const SearchSpace& space);

/// Registry-backed convenience for benchmark objectives.
ComparisonReport run_experiment(const Experiment& exp);

enum class Format { csv, json };
Format format_from_string(const std::string& s);

/// Serializes the report. CSV carries the raw per-run rows with the fixed
/// header (algorithm, run, seed, best_value, evals, elapsed_s); JSON carries
/// the whole report. Floats are written with 17 significant digits; files are
/// written atomically.
void emit(const ComparisonReport& report, const std::string& path, Format format);
std::string to_csv(const ComparisonReport& report);
std::string to_json(const ComparisonReport& report);

/// Inverse of emit: a CSV is re-summarized from its raw rows; JSON is read
/// back field by field.
ComparisonReport load(const std::string& path, Format format);
ComparisonReport from_csv(const std::string& text);
ComparisonReport from_json(const std::string& text);

/// Recomputes summary statistics and Wilcoxon p-values from the raw rows.
void summarize(ComparisonReport& report);

/// Thread cap from SWARMSTAT_THREADS (falls back to the hardware count).
unsigned thread_cap();

} // namespace swarmstat::experiment
