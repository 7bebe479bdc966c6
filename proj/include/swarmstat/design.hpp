#pragma once

#include <string>
#include <vector>

#include "swarmstat/objective.hpp"
#include "swarmstat/optimizer.hpp"

namespace swarmstat::design {

enum class FactorKind { binary, continuous };

struct Factor {
    std::string name;
    FactorKind kind = FactorKind::continuous;
    double lower = -1.0;
    double upper = 1.0;
};

/// Logistic-model specification: factors, monomial terms (lists of factor
/// indices; empty list = intercept), and the nominal parameter vector. With
/// `coded_units` (the default), continuous factors are affinely mapped to
/// [-1, 1] before monomials are built and theta0 is read on that scale.
struct ModelSpec {
    std::vector<Factor> factors;
    std::vector<std::vector<int>> terms;
    std::vector<double> theta0;
    bool coded_units = true;

    std::size_t num_terms() const { return terms.size(); }
    std::size_t num_factors() const { return factors.size(); }
    void validate() const;
};

struct ApproximateDesign {
    std::vector<std::vector<double>> points; // factor-space coordinates
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
    void validate(const ModelSpec& spec) const;
};

/// Model vector f(x) at a factor-space point.
std::vector<double> model_vector(std::span<const double> point, const ModelSpec& spec);

/// M(xi) = sum_i w_i sigma(eta_i)(1 - sigma(eta_i)) f(x_i) f(x_i)', eta = theta0' f.
std::vector<double> information_matrix(const ApproximateDesign& design,
                                       const ModelSpec& spec); // row-major p x p

struct Criterion {
    double log_det = 0.0;
    bool singular = false;

    double value() const; // large negative sentinel when singular
};

/// log det M via a pivoted LDLT; singular when the smallest pivot falls below
/// 1e-12 times the largest.
Criterion d_criterion(const ApproximateDesign& design, const ModelSpec& spec);

/// Sensitivity d(x, xi) = sigma(eta)(1-sigma(eta)) f(x)' M^{-1} f(x).
double sensitivity(std::span<const double> point, const ApproximateDesign& design,
                   const ModelSpec& spec);

/// CSO-MA search over k candidate points plus k raw weights. Weights are
/// normalized by their sum; the result is pruned by merging points within
/// coded distance 1e-2 (weight-averaged) and dropping weights below 1e-3.
ApproximateDesign design_search(const ModelSpec& spec, int k, const OptConfig& config);

struct EfficiencyBound {
    double atwood = 0.0;      // p / d_max, the reported bound
    double exponential = 0.0; // exp(1 - d_max / p)
    double d_max = 0.0;
    std::vector<double> argmax;
};

/// Maximizes the sensitivity over the factor space with an inner CSO-MA run
/// (seed derived from inner_config.seed) cross-checked against a coarse grid
/// over binary sign patterns x continuous levels.
EfficiencyBound d_efficiency_lower_bound(const ApproximateDesign& design,
                                         const ModelSpec& spec,
                                         const OptConfig& inner_config);

/// The ten-factor car-refueling study: four binary factors, six continuous
/// ones, sixteen terms (intercept, mains, three two-factor and two
/// three-factor interactions), nominal theta in coded units.
ModelSpec car_refuel_spec();

/// Two-parameter logistic (intercept + one continuous factor on [-5, 5],
/// natural units) used as the closed-form oracle case.
ModelSpec logistic2_spec();

/// Model-spec file: `factor <name> <binary|continuous> <lower> <upper>`,
/// `term <1|name[*name...]>`, `theta <v1> <v2> ...`, `coded <true|false>`.
ModelSpec load_spec(const std::string& path);
std::string spec_to_string(const ModelSpec& spec);

/// Design table with one row per point, weight last, factors in natural units.
std::string design_to_csv(const ApproximateDesign& design, const ModelSpec& spec);

} // namespace swarmstat::design
