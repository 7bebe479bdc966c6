#include "swarmstat/scad.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "swarmstat/csv.hpp"
#include "swarmstat/errors.hpp"
#include "swarmstat/random.hpp"
#include "swarmstat/stats.hpp"

namespace swarmstat::scad {

std::vector<double> ScadConfig::default_rho_grid() {
    return {1e-6, 1e-5, 1e-4, 1e-3, 0.01, 0.025, 0.05, 0.1, 0.2, 0.5, 1.0, 10.0, 100.0};
}

void ScadConfig::validate() const {
    if (a <= 2.0) throw DomainError("scad: a must exceed 2");
    if (lambda <= 0.0) throw DomainError("scad: lambda must be positive");
    if (rho_grid.empty()) throw DomainError("scad: empty rho grid");
    for (std::size_t i = 0; i < rho_grid.size(); ++i) {
        if (rho_grid[i] <= 0.0) throw DomainError("scad: rho values must be positive");
        if (i > 0 && rho_grid[i] <= rho_grid[i - 1])
            throw DomainError("scad: rho grid must be strictly increasing");
    }
}

void RegressionData::validate() const {
    if (X.empty()) throw DomainError("scad: empty design");
    const std::size_t p = names.size();
    for (const auto& row : X)
        if (row.size() != p) throw DomainError("scad: ragged design matrix");
    if (y.size() != X.size()) throw DomainError("scad: response length mismatch");
}

void standardize(RegressionData& data) {
    data.validate();
    const std::size_t n = data.rows(), p = data.predictors();
    if (n < 2) throw DomainError("scad: need at least two rows to standardize");
    for (std::size_t j = 0; j < p; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += data.X[i][j];
        m /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += (data.X[i][j] - m) * (data.X[i][j] - m);
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (sd <= 0.0)
            throw DomainError("scad: constant column '" + data.names[j] + "'");
        for (std::size_t i = 0; i < n; ++i) data.X[i][j] = (data.X[i][j] - m) / sd;
    }
    data.standardized = true;
}

double penalty(double beta_j, double lambda, double a) {
    const double b = std::abs(beta_j);
    if (b <= lambda) return lambda * b;
    if (b <= a * lambda)
        return (2.0 * a * lambda * b - b * b - lambda * lambda) / (2.0 * (a - 1.0));
    return lambda * lambda * (a + 1.0) / 2.0;
}

double objective_value(std::span<const double> beta, const RegressionData& data,
                       double rho, const ScadConfig& cfg) {
    data.validate();
    if (beta.size() != data.predictors())
        throw DomainError("scad: coefficient dimension mismatch");
    double rss = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        double fit = 0.0;
        for (std::size_t j = 0; j < beta.size(); ++j) fit += data.X[i][j] * beta[j];
        const double r = data.y[i] - fit;
        rss += r * r;
    }
    double pen = 0.0;
    for (const double bj : beta) pen += penalty(bj, cfg.lambda, cfg.a);
    return rss + rho * pen;
}

Objective make_objective(const RegressionData& data, double rho, const ScadConfig& cfg) {
    data.validate();
    cfg.validate();
    const std::size_t n = data.rows(), p = data.predictors();
    // Gram form: ||y||^2 - 2 b'X'y + b'X'Xb, precomputed once
    auto gram = std::make_shared<std::vector<double>>(p * p, 0.0);
    auto xty = std::make_shared<std::vector<double>>(p, 0.0);
    double yty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        yty += data.y[i] * data.y[i];
        for (std::size_t j = 0; j < p; ++j) {
            (*xty)[j] += data.X[i][j] * data.y[i];
            for (std::size_t k = j; k < p; ++k)
                (*gram)[j * p + k] += data.X[i][j] * data.X[i][k];
        }
    }
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < j; ++k) (*gram)[j * p + k] = (*gram)[k * p + j];

    const double lambda = cfg.lambda, a = cfg.a;
    return Objective::pure(
        "scad", [gram, xty, yty, rho, lambda, a, p](std::span<const double> beta) {
            double quad = 0.0, lin = 0.0, pen = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                lin += (*xty)[j] * beta[j];
                double row = 0.0;
                for (std::size_t k = 0; k < p; ++k) row += (*gram)[j * p + k] * beta[k];
                quad += beta[j] * row;
                pen += penalty(beta[j], lambda, a);
            }
            return yty - 2.0 * lin + quad + rho * pen;
        });
}

SearchSpace parameter_space(const RegressionData& data) {
    return SearchSpace::box(data.predictors(), -3.0, 3.0);
}

std::vector<PathPoint> solution_path(const RegressionData& data, const ScadConfig& cfg,
                                     const OptConfig& opt_config, int runs) {
    data.validate();
    cfg.validate();
    if (!data.standardized) throw DomainError("scad: standardize the design first");
    if (runs < 1) throw ConfigError("scad: runs must be >= 1");

    const SearchSpace box = parameter_space(data);
    const std::size_t p = data.predictors();
    std::vector<PathPoint> path;
    for (std::size_t g = 0; g < cfg.rho_grid.size(); ++g) {
        const double rho = cfg.rho_grid[g];
        const Objective obj = make_objective(data, rho, cfg);

        std::vector<std::vector<double>> betas;
        PathPoint point;
        point.rho = rho;
        for (int r = 0; r < runs; ++r) {
            OptConfig run_config = opt_config;
            run_config.seed = opt_config.seed + g * 1000 + static_cast<std::uint64_t>(r);
            const OptResult res = minimize(obj, box, run_config);
            // the penalty is bounded, so a minimizer pressed against the box
            // means the box mattered; flag such runs
            const auto flags = boundary_flags(res.best_position, box);
            if (std::find(flags.begin(), flags.end(), true) != flags.end())
                ++point.boundary_runs;
            betas.push_back(res.best_position);
            point.min_values.push_back(res.best_value);
        }
        point.beta_mean.resize(p);
        point.beta_sd.resize(p);
        for (std::size_t j = 0; j < p; ++j) {
            std::vector<double> col(betas.size());
            for (std::size_t r = 0; r < betas.size(); ++r) col[r] = betas[r][j];
            point.beta_mean[j] = stats::mean(col);
            point.beta_sd[j] = stats::sd(col);
        }
        point.min_mean = stats::mean(point.min_values);
        point.min_sd = stats::sd(point.min_values);
        path.push_back(std::move(point));
    }
    return path;
}

std::string path_to_csv(const std::vector<PathPoint>& path,
                        const std::vector<std::string>& names) {
    std::ostringstream os;
    os << "rho_index,rho";
    for (const auto& n : names) os << "," << n << "_mean," << n << "_sd";
    os << ",min_mean,min_sd\n";
    for (std::size_t g = 0; g < path.size(); ++g) {
        os << (g + 1) << "," << csv::format_double(path[g].rho);
        for (std::size_t j = 0; j < names.size(); ++j)
            os << "," << csv::format_double(path[g].beta_mean[j]) << ","
               << csv::format_double(path[g].beta_sd[j]);
        os << "," << csv::format_double(path[g].min_mean) << ","
           << csv::format_double(path[g].min_sd) << "\n";
    }
    return os.str();
}

RegressionData load_csv(const std::string& path, const std::string& response) {
    const auto table = csv::read_file(path, true);
    const std::size_t yc = table.column(response);
    RegressionData data;
    for (std::size_t j = 0; j < table.header.size(); ++j)
        if (j != yc) data.names.push_back(table.header[j]);
    for (const auto& row : table.rows) {
        std::vector<double> xs;
        xs.reserve(data.names.size());
        for (std::size_t j = 0; j < row.size(); ++j) {
            const auto v = csv::to_number(row[j]);
            if (!v) throw DomainError("scad: missing value in " + path);
            if (j == yc)
                data.y.push_back(*v);
            else
                xs.push_back(*v);
        }
        data.X.push_back(std::move(xs));
    }
    data.validate();
    return data;
}

RegressionData synthetic_lake(std::uint64_t seed) {
    // mimics the variable structure of a seasonal limnology survey: nutrient
    // measures correlate with total nitrogen, ion concentrations with total
    // dissolved solids
    RegressionData data;
    data.names = {"Depth", "Chl-a", "DO",  "Turbidity", "pH", "NH4-N",
                  "NO3-N", "TN",    "TP",  "TOC",       "TDS", "T",
                  "Ca",    "K",     "Mg",  "Na",        "F"};
    const std::size_t n = 114, p = data.names.size();
    Rng rng(seed);

    data.X.assign(n, std::vector<double>(p, 0.0));
    data.y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double nutrient = rng.normal(); // shared nutrient factor
        const double ionic = rng.normal();    // shared ion/TDS factor
        const double season = rng.normal();   // shared seasonal factor
        auto noise = [&] { return 0.6 * rng.normal(); };
        auto& row = data.X[i];
        row[0] = rng.normal();                          // Depth
        row[1] = 0.5 * nutrient + noise();              // Chl-a
        row[2] = -0.4 * season + noise();               // DO
        row[3] = 0.5 * nutrient + noise();              // Turbidity
        row[4] = 0.3 * ionic + noise();                 // pH
        row[5] = 0.8 * nutrient + noise();              // NH4-N
        row[6] = 0.8 * nutrient + noise();              // NO3-N
        row[7] = 0.9 * nutrient + 0.3 * noise();        // TN
        row[8] = 0.6 * nutrient + noise();              // TP
        row[9] = 0.4 * nutrient + noise();              // TOC
        row[10] = 0.9 * ionic + 0.3 * noise();          // TDS
        row[11] = 0.9 * season + noise();               // T
        row[12] = 0.7 * ionic + noise();                // Ca
        row[13] = 0.7 * ionic + noise();                // K
        row[14] = 0.8 * ionic + noise();                // Mg
        row[15] = 0.8 * ionic + noise();                // Na
        row[16] = 0.4 * ionic + noise();                // F
    }
    standardize(data);

    // sparse truth on the standardized scale, magnitudes like the survey fits
    std::vector<double> truth(p, 0.0);
    truth[0] = 0.19;   // Depth
    truth[2] = 0.22;   // DO
    truth[3] = -0.20;  // Turbidity
    truth[5] = 0.17;   // NH4-N
    truth[6] = 0.13;   // NO3-N
    truth[11] = 0.50;  // T
    truth[15] = -0.16; // Na
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (std::size_t j = 0; j < p; ++j) fit += data.X[i][j] * truth[j];
        data.y[i] = fit + 0.15 * rng.normal();
    }
    return data;
}

} // namespace swarmstat::scad
