#include "swarmstat/scgtm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "swarmstat/csv.hpp"
#include "swarmstat/errors.hpp"
#include "swarmstat/random.hpp"

namespace swarmstat::scgtm {

namespace {

constexpr double kLogFloor = -690.77552789821368; // log(1e-300)

double log_floor(double log_p) { return std::max(log_p, kLogFloor); }

double logistic(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log NB(y | mean tau, size phi) in the phi-parameterized form, regrouped
// through log-gamma identities for stability
double log_nb(double y, double tau, double phi) {
    if (tau <= 0.0) return (y == 0.0) ? 0.0 : kLogFloor;
    return std::lgamma(phi + y) - std::lgamma(phi) - std::lgamma(y + 1.0) +
           y * (std::log(tau) - std::log(phi + tau)) +
           phi * (std::log(phi) - std::log(phi + tau));
}

double log_sum_exp(double a, double b) {
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

} // namespace

void CellData::validate() const {
    if (y.size() != t.size()) throw DomainError("scgtm: y and t differ in length");
    if (y.empty()) throw DomainError("scgtm: empty data");
    for (const double v : y)
        if (v < 0.0 || v != std::floor(v) || !std::isfinite(v))
            throw DomainError("scgtm: counts must be non-negative integers");
    for (const double v : t)
        if (!std::isfinite(v)) throw DomainError("scgtm: non-finite pseudotime");
}

double hill_mean(double t_c, const Params& p) {
    const double k = (t_c <= p.t0) ? p.k1 : p.k2;
    const double d = t_c - p.t0;
    const double log_tau_plus_1 = p.b + p.mu_mag * std::exp(-k * d * d);
    return std::max(0.0, std::exp(log_tau_plus_1) - 1.0);
}

double zero_inflation_prob(double tau_c, const Params& p) {
    return logistic(p.alpha * std::log1p(tau_c) + p.beta);
}

double nll(const Params& p, const CellData& data) {
    data.validate();
    if (p.k1 < 0.0 || p.k2 < 0.0) throw DomainError("scgtm: negative curvature");
    if (p.phi < 1.0 || p.phi != std::floor(p.phi))
        throw DomainError("scgtm: dispersion must be a positive integer");

    // Kahan summation so the total is order-independent to ~1e-10
    double sum = 0.0, comp = 0.0;
    for (std::size_t c = 0; c < data.cells(); ++c) {
        const double tau = hill_mean(data.t[c], p);
        const double pc = zero_inflation_prob(tau, p);
        double log_lik = std::log1p(-pc) + log_nb(data.y[c], tau, p.phi);
        if (data.y[c] == 0.0) log_lik = log_sum_exp(log_lik, std::log(pc));
        const double term = -log_floor(log_lik);
        const double t = sum + term;
        comp += (std::abs(sum) >= std::abs(term)) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

SearchSpace parameter_space(const CellData& data, bool estimate_baseline) {
    data.validate();
    double lo_mu = std::numeric_limits<double>::infinity(), hi_mu = 0.0;
    double lo_t = std::numeric_limits<double>::infinity(), hi_t = -lo_t;
    for (std::size_t c = 0; c < data.cells(); ++c) {
        const double m = std::log1p(data.y[c]);
        lo_mu = std::min(lo_mu, m);
        hi_mu = std::max(hi_mu, m);
        lo_t = std::min(lo_t, data.t[c]);
        hi_t = std::max(hi_t, data.t[c]);
    }
    if (!(lo_mu < hi_mu))
        throw DomainError("scgtm: degenerate magnitude range (all counts equal)");
    if (!(lo_t < hi_t)) throw DomainError("scgtm: degenerate pseudotime range");

    SearchSpace s;
    s.lower = {lo_mu, 0.0, 0.0, lo_t, 1.0, -10.0, -10.0};
    s.upper = {hi_mu, 500.0, 500.0, hi_t, 100.0, 10.0, 10.0};
    s.kind = {CoordKind::continuous, CoordKind::continuous, CoordKind::continuous,
              CoordKind::continuous, CoordKind::integer, CoordKind::continuous,
              CoordKind::continuous};
    if (estimate_baseline) {
        s.lower.push_back(-5.0);
        s.upper.push_back(5.0);
        s.kind.push_back(CoordKind::continuous);
    }
    s.validate();
    return s;
}

Params params_from_vector(std::span<const double> x, bool estimate_baseline) {
    Params p;
    p.mu_mag = x[0];
    p.k1 = x[1];
    p.k2 = x[2];
    p.t0 = x[3];
    p.phi = x[4];
    p.alpha = x[5];
    p.beta = x[6];
    p.b = estimate_baseline ? x[7] : 0.0;
    return p;
}

Objective make_objective(const CellData& data, bool estimate_baseline) {
    return Objective::pure("scgtm-nll",
                           [data, estimate_baseline](std::span<const double> x) {
                               return nll(params_from_vector(x, estimate_baseline), data);
                           });
}

CellData load_csv(const std::string& path) {
    const auto table = csv::read_file(path, true);
    const std::size_t tc = table.column("t");
    const std::size_t yc = table.column("y");
    CellData data;
    for (const auto& row : table.rows) {
        const auto t = csv::to_number(row.at(tc));
        const auto y = csv::to_number(row.at(yc));
        if (!t || !y) throw DomainError("scgtm: missing cell in " + path);
        data.t.push_back(*t);
        data.y.push_back(*y);
    }
    data.validate();
    return data;
}

CellData synthesize(const Params& truth, std::size_t cells, std::uint64_t seed) {
    Rng rng(seed);
    CellData data;
    data.t.resize(cells);
    data.y.resize(cells);
    for (std::size_t c = 0; c < cells; ++c) data.t[c] = rng.uniform();

    for (std::size_t c = 0; c < cells; ++c) {
        const double tau = hill_mean(data.t[c], truth);
        const double pc = zero_inflation_prob(tau, truth);
        if (rng.uniform() < pc) {
            data.y[c] = 0.0;
            continue;
        }
        // NB draw as a gamma-Poisson mixture (Marsaglia-Tsang gamma).
        double lambda = 0.0;
        if (tau > 0.0) {
            const double shape = truth.phi;
            const double scale = tau / truth.phi;
            const double d = shape - 1.0 / 3.0;
            const double cfac = 1.0 / std::sqrt(9.0 * d);
            for (;;) {
                double xN = rng.normal();
                double v = 1.0 + cfac * xN;
                if (v <= 0.0) continue;
                v = v * v * v;
                const double u = rng.uniform();
                if (u < 1.0 - 0.0331 * xN * xN * xN * xN ||
                    std::log(u) < 0.5 * xN * xN + d * (1.0 - v + std::log(v))) {
                    lambda = d * v * scale;
                    break;
                }
            }
        }
        // Poisson by multiplication; lambda stays modest for realistic genes
        double y = 0.0;
        const double limit = std::exp(-lambda);
        double prod = rng.uniform();
        while (prod > limit) {
            prod *= rng.uniform();
            y += 1.0;
        }
        data.y[c] = y;
    }
    return data;
}

} // namespace swarmstat::scgtm
