#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swarmstat/objective.hpp"
#include "swarmstat/search_space.hpp"

namespace swarmstat::scgtm {

/// Hill-trend parameters: the mean curve peaks at t0 with log-magnitude
/// mu_mag, falling off with curvature k1 on the left and k2 on the right.
/// alpha/beta link the zero-inflation probability to the mean; b is a fixed
/// baseline (0 unless estimated).
struct Params {
    double mu_mag = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
    double t0 = 0.0;
    double phi = 1.0; // dispersion, positive integer
    double alpha = 0.0;
    double beta = 0.0;
    double b = 0.0;
};

struct CellData {
    std::vector<double> y; // non-negative integer counts
    std::vector<double> t; // pseudotimes

    std::size_t cells() const { return y.size(); }
    void validate() const;
};

/// Mean count tau at pseudotime t_c (>= 0; the curvature branch switches at t0).
double hill_mean(double t_c, const Params& p);

/// Zero-inflation probability from the logistic link on log(tau + 1).
double zero_inflation_prob(double tau_c, const Params& p);

/// Negative log-likelihood of the zero-inflated negative-binomial model,
/// summed over cells in log space with compensated summation. Probabilities
/// are floored at 1e-300 inside logs, so the value is always finite.
double nll(const Params& p, const CellData& data);

/// Parameter box: mu_mag in [min, max] of log(y+1), k1/k2 in [0, 500], t0 in
/// [min t, max t], phi integer in [1, 100], alpha/beta in [-10, 10]. With
/// estimate_baseline, b is appended as a final coordinate in [-5, 5].
SearchSpace parameter_space(const CellData& data, bool estimate_baseline = false);

/// Coordinate order used by parameter_space / the optimizer objective.
Params params_from_vector(std::span<const double> x, bool estimate_baseline = false);

Objective make_objective(const CellData& data, bool estimate_baseline = false);

/// Loads a two-column `t,y` CSV (header required), one file per gene.
CellData load_csv(const std::string& path);

/// Deterministic synthetic gene: pseudotimes uniform on (0, 1), counts drawn
/// from the model at `truth`.
CellData synthesize(const Params& truth, std::size_t cells, std::uint64_t seed);

} // namespace swarmstat::scgtm
