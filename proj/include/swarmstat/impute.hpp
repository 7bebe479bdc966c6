#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swarmstat/optimizer.hpp"

namespace swarmstat::impute {

/// Two-compartment mean parameters; theta4 is derived from theta1..theta3.
struct CompartmentParams {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double theta3 = 0.0;

    double theta4() const; // throws DomainError when the denominator vanishes
};

/// (mu1, mu2) at time x.
std::array<double, 2> compartment_means(double x, const CompartmentParams& p);

struct BivariateData {
    std::vector<double> x;                          // times
    std::vector<std::array<double, 2>> y;           // values (ignored where missing)
    std::vector<std::array<bool, 2>> observed;      // mask
    std::array<std::array<double, 2>, 2> sigma{};   // known covariance

    std::size_t rows() const { return x.size(); }
    void validate() const;
};

struct EStepResult {
    std::vector<std::array<double, 2>> filled;
    // per-row conditional covariance of the fill-in (zero where observed)
    std::vector<std::array<std::array<double, 2>, 2>> cond_cov;
};

/// Conditional-normal fill-in: observed cells pass through with zero
/// conditional covariance; one-missing cells get the regression mean and
/// variance sigma_miss^2 (1 - rho^2); all-missing rows get (mu1, mu2) and the
/// full covariance.
EStepResult e_step(const BivariateData& data, const CompartmentParams& p);

/// Theta-dependent part of the conditional expected log-likelihood:
/// -1/2 sum_i (y_i - mu(x_i))' Sigma^{-1} (y_i - mu(x_i)). The theta-free
/// trace term -1/2 sum_i tr(Sigma^{-1} c_i) is reported separately by
/// q_trace_term so ascent diagnostics can include it.
double q_function(const CompartmentParams& p, const EStepResult& e,
                  const BivariateData& data);

double q_trace_term(const EStepResult& e, const BivariateData& data);

/// Observed-data log-likelihood from the marginal/conditional normal
/// factorization of each row's observed cells (both-missing rows contribute 0).
double observed_loglik(const CompartmentParams& p, const BivariateData& data);

struct EmTraceEntry {
    CompartmentParams theta;
    double q_value = 0.0;          // q_function + trace term at the accepted theta
    double observed_loglik = 0.0;
};

struct EmResult {
    CompartmentParams theta;
    std::vector<std::array<double, 2>> imputed; // final E-step fill at theta
    std::vector<EmTraceEntry> trace;            // one entry per EM iteration
    int iterations_run = 0;
};

/// EM loop: E-step at the current theta, then CSO-MA maximization of the
/// q-function over [0,1]^3. Stops after em_iters iterations or when theta
/// moves by less than 1e-6 in max norm. Every M-step reuses opt_config.seed,
/// so a missing-free dataset gives the identical theta at every iteration.
EmResult em_fit(const BivariateData& data, const CompartmentParams& theta_init,
                int em_iters, const OptConfig& opt_config);

/// Loads a `x,y1,y2` CSV with empty cells marking missing values.
BivariateData load_csv(const std::string& path, std::array<std::array<double, 2>, 2> sigma);

/// Estimates Sigma from fully observed rows (sample covariance, n-1).
std::array<std::array<double, 2>, 2> sigma_from_complete_rows(const BivariateData& data);

/// The nine-row pharmacokinetics fixture used in the documentation examples,
/// with its published covariance estimate already attached.
BivariateData fixture_table();

/// Simulated dataset from known theta with `missing` cells masked at random.
BivariateData simulate(const CompartmentParams& truth, std::size_t rows,
                       std::size_t missing, std::array<std::array<double, 2>, 2> sigma,
                       std::uint64_t seed);

} // namespace swarmstat::impute
