#pragma once

#include <string>
#include <vector>

#include "swarmstat/objective.hpp"
#include "swarmstat/search_space.hpp"

namespace swarmstat::rasch {

/// N x I binary response matrix, persons by items.
struct ResponseData {
    std::vector<std::vector<double>> responses;

    std::size_t persons() const { return responses.size(); }
    std::size_t items() const { return responses.empty() ? 0 : responses[0].size(); }
    void validate() const;
};

struct Params {
    std::vector<double> beta; // item difficulties
    double sigma2 = 1.0;      // ability prior variance
};

/// P(correct | ability theta, difficulty beta_i).
double item_prob(double theta, double beta_i);

/// Gauss-Hermite nodes and weights for integrating against exp(-u^2).
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};
Quadrature gauss_hermite(int n);

/// Marginal negative log-likelihood: the person-level ability is integrated
/// out against N(0, sigma2) by `nodes`-point Gauss-Hermite quadrature after
/// the substitution theta = sqrt(2 sigma2) u; person terms are combined with
/// log-sum-exp across nodes.
double marginal_nll(const Params& p, const ResponseData& data, int nodes = 21);

/// Box: beta_i in [-6, 6], sigma2 in [1e-3, 25] (last coordinate).
SearchSpace parameter_space(const ResponseData& data);

Params params_from_vector(std::span<const double> x);

Objective make_objective(const ResponseData& data, int nodes = 21);

/// Loads a headerless CSV of 0/1 entries, one person per row.
ResponseData load_csv(const std::string& path);

/// Simulated data from known parameters; abilities are drawn from the prior.
ResponseData simulate(const Params& truth, std::size_t persons, std::uint64_t seed);

} // namespace swarmstat::rasch
