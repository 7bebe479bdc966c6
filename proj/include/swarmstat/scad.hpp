#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swarmstat/objective.hpp"
#include "swarmstat/optimizer.hpp"

namespace swarmstat::scad {

struct ScadConfig {
    double a = 2.5;
    double lambda = 1.0;
    std::vector<double> rho_grid = default_rho_grid();

    static std::vector<double> default_rho_grid();
    void validate() const;
};

struct RegressionData {
    std::vector<std::string> names;       // predictor names
    std::vector<std::vector<double>> X;   // rows x predictors
    std::vector<double> y;
    bool standardized = false;

    std::size_t rows() const { return X.size(); }
    std::size_t predictors() const { return names.size(); }
    void validate() const;
};

/// Centers and scales every column of X to mean 0, sample SD 1 (n-1).
void standardize(RegressionData& data);

/// Penalty value for one coefficient: linear to lambda, quadratic blend to
/// a*lambda, constant lambda^2 (a+1)/2 beyond. Continuous at both knots.
double penalty(double beta_j, double lambda, double a);

/// ||y - X beta||^2 + rho * sum_j penalty(beta_j).
double objective_value(std::span<const double> beta, const RegressionData& data,
                       double rho, const ScadConfig& cfg);

/// Swarm objective with the Gram matrix precomputed.
Objective make_objective(const RegressionData& data, double rho, const ScadConfig& cfg);

/// Coefficient box for standardized data.
SearchSpace parameter_space(const RegressionData& data);

struct PathPoint {
    double rho = 0.0;
    std::vector<double> beta_mean;
    std::vector<double> beta_sd;
    double min_mean = 0.0;
    double min_sd = 0.0;
    std::vector<double> min_values; // raw attained minima, one per run
    int boundary_runs = 0; // runs whose minimizer sat within 1% of the box
};

/// For each rho in the grid, `runs` seeded optimizations (seed schedule
/// base + grid_index*1000 + run_index); records per-coordinate mean/SD of the
/// estimate and of the attained minimum.
std::vector<PathPoint> solution_path(const RegressionData& data, const ScadConfig& cfg,
                                     const OptConfig& opt_config, int runs = 50);

std::string path_to_csv(const std::vector<PathPoint>& path,
                        const std::vector<std::string>& names);

/// Loads a CSV with a header of variable names; `response` names the y column.
RegressionData load_csv(const std::string& path, const std::string& response);

/// 114 x 17 synthetic fixture with correlated limnology-style predictors and a
/// sparse ground truth, standardized.
RegressionData synthetic_lake(std::uint64_t seed = 20190601);

} // namespace swarmstat::scad
