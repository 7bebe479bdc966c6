#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "swarmstat/objective.hpp"
#include "swarmstat/random.hpp"

namespace swarmstat::renewal {

/// Directed transition graph over states {0, ..., r-1}. States with no
/// outgoing allowed pair are absorbing.
struct TransitionStructure {
    int states = 0;
    std::vector<std::pair<int, int>> allowed;

    void validate() const;
    bool is_absorbing(int state) const;
    std::vector<int> targets_of(int state) const;
    /// Index of (from, to) within `allowed`; -1 when not allowed.
    int pair_index(int from, int to) const;
};

/// Named presets: "complete3" (3 states, all ordered pairs), "bmt5" (the
/// five-state transplant topology: 0=TX, 1=AGVHD, 2=CGVHD, 3=Relapse,
/// 4=Death in remission; 3 and 4 absorbing), "twostate" (0 -> 1, 1 absorbing).
TransitionStructure preset(const std::string& name);

enum class Termination { absorption, horizon };

struct Path {
    std::vector<int> states;   // X_0, X_1, ..., X_K
    std::vector<double> times; // T_0 = 0 < T_1 < ... < T_K
    Termination terminated_by = Termination::horizon;

    std::size_t jumps() const { return states.empty() ? 0 : states.size() - 1; }
};

/// Per-individual covariates: one d-vector per allowed pair.
struct CovariateSet {
    std::size_t dim = 0;                                 // d
    std::vector<std::vector<std::vector<double>>> z;     // [individual][pair][k]

    const std::vector<double>& at(std::size_t individual, int pair_idx) const {
        return z[individual][static_cast<std::size_t>(pair_idx)];
    }
};

struct Sample {
    TransitionStructure structure;
    std::vector<Path> paths;
    CovariateSet covariates;
};

/// Simulates one individual: from state i the sojourn is exponential with
/// total rate sum_k lambda0 * exp(beta' Z_ik), the destination proportional to
/// the per-pair rates. Stops at absorption or when the next jump would pass
/// the horizon (the path then ends at the last completed jump).
Path simulate_individual(const TransitionStructure& s, double baseline_rate,
                         std::span<const double> beta,
                         const std::vector<std::vector<double>>& z_individual,
                         double horizon, int start_state, Rng& rng);

/// Simulates M individuals with fresh uniform [-1, 1]^d covariates per
/// (individual, pair), per-individual RNG streams derived from (seed, m).
Sample simulate_sample(const TransitionStructure& s, std::size_t individuals,
                       std::size_t covariate_dim, double baseline_rate,
                       std::span<const double> beta, double horizon,
                       std::uint64_t seed, int start_state = 0);

/// Estimating-function value U(beta): per observed transition, the covariate
/// minus the risk-set average S1/S0 at that sojourn time, summed over
/// channels and individuals (sorted-sweep implementation).
std::vector<double> score(std::span<const double> beta, const Sample& sample);

/// ||U(beta)||_p; p = infinity accepted as std::numeric_limits<double>::infinity().
double mnorm_objective(std::span<const double> beta, const Sample& sample, double p);

/// Negative partial log-likelihood over the same channels; its gradient is -U.
double cox_partial_nll(std::span<const double> beta, const Sample& sample);

Objective make_mnorm_objective(const Sample& sample, double p = 2.0);
Objective make_partial_nll_objective(const Sample& sample);

/// Path rows as CSV text (m, n, from, to, time) and back.
std::string paths_to_csv(const Sample& sample);
std::vector<Path> paths_from_csv(const std::string& text);

} // namespace swarmstat::renewal
