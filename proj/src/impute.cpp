#include "swarmstat/impute.hpp"

#include <cmath>

#include "swarmstat/csv.hpp"
#include "swarmstat/errors.hpp"
#include "swarmstat/random.hpp"

namespace swarmstat::impute {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112353;

struct Sigma2x2 {
    double s11, s12, s22, det;
    // inverse entries
    double i11, i12, i22;
};

Sigma2x2 decompose(const std::array<std::array<double, 2>, 2>& s) {
    Sigma2x2 d{};
    d.s11 = s[0][0];
    d.s12 = s[0][1];
    d.s22 = s[1][1];
    if (s[0][1] != s[1][0]) throw DomainError("impute: covariance not symmetric");
    d.det = d.s11 * d.s22 - d.s12 * d.s12;
    if (d.s11 <= 0.0 || d.s22 <= 0.0 || d.det <= 0.0)
        throw DomainError("impute: covariance not positive definite");
    d.i11 = d.s22 / d.det;
    d.i22 = d.s11 / d.det;
    d.i12 = -d.s12 / d.det;
    return d;
}

} // namespace

double CompartmentParams::theta4() const {
    const double num = (theta3 - theta2) * theta1 * (1.0 - theta1);
    const double den = (theta3 - theta2) * theta1 + theta2;
    if (den == 0.0) throw DomainError("impute: theta4 denominator is zero");
    return num / den;
}

std::array<double, 2> compartment_means(double x, const CompartmentParams& p) {
    const double t4 = p.theta4();
    const double e2 = std::exp(-p.theta2 * x);
    const double e3 = std::exp(-p.theta3 * x);
    const double mu1 = p.theta1 * e2 + (1.0 - p.theta1) * e3;
    const double mu2 = 1.0 - (p.theta1 + t4) * e2 + (p.theta1 + t4 - 1.0) * e3;
    return {mu1, mu2};
}

void BivariateData::validate() const {
    if (x.size() != y.size() || x.size() != observed.size())
        throw DomainError("impute: column lengths differ");
    if (x.empty()) throw DomainError("impute: empty dataset");
    decompose(sigma);
}

EStepResult e_step(const BivariateData& data, const CompartmentParams& p) {
    data.validate();
    const Sigma2x2 s = decompose(data.sigma);
    const double rho = s.s12 / std::sqrt(s.s11 * s.s22);

    EStepResult out;
    out.filled.resize(data.rows());
    out.cond_cov.assign(data.rows(), {{{0.0, 0.0}, {0.0, 0.0}}});

    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto mu = compartment_means(data.x[i], p);
        const bool o1 = data.observed[i][0];
        const bool o2 = data.observed[i][1];
        auto& f = out.filled[i];
        auto& c = out.cond_cov[i];
        if (o1 && o2) {
            f = data.y[i];
        } else if (o1 && !o2) {
            f[0] = data.y[i][0];
            f[1] = mu[1] + rho * std::sqrt(s.s22 / s.s11) * (data.y[i][0] - mu[0]);
            c[1][1] = s.s22 * (1.0 - rho * rho);
        } else if (!o1 && o2) {
            f[1] = data.y[i][1];
            f[0] = mu[0] + rho * std::sqrt(s.s11 / s.s22) * (data.y[i][1] - mu[1]);
            c[0][0] = s.s11 * (1.0 - rho * rho);
        } else {
            f[0] = mu[0];
            f[1] = mu[1];
            c[0][0] = s.s11;
            c[0][1] = s.s12;
            c[1][0] = s.s12;
            c[1][1] = s.s22;
        }
    }
    return out;
}

double q_function(const CompartmentParams& p, const EStepResult& e,
                  const BivariateData& data) {
    const Sigma2x2 s = decompose(data.sigma);
    double q = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto mu = compartment_means(data.x[i], p);
        const double r1 = e.filled[i][0] - mu[0];
        const double r2 = e.filled[i][1] - mu[1];
        q -= 0.5 * (r1 * (s.i11 * r1 + s.i12 * r2) + r2 * (s.i12 * r1 + s.i22 * r2));
    }
    return q;
}

double q_trace_term(const EStepResult& e, const BivariateData& data) {
    const Sigma2x2 s = decompose(data.sigma);
    double t = 0.0;
    for (const auto& c : e.cond_cov)
        t -= 0.5 * (s.i11 * c[0][0] + 2.0 * s.i12 * c[0][1] + s.i22 * c[1][1]);
    return t;
}

double observed_loglik(const CompartmentParams& p, const BivariateData& data) {
    const Sigma2x2 s = decompose(data.sigma);
    double ll = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto mu = compartment_means(data.x[i], p);
        const bool o1 = data.observed[i][0];
        const bool o2 = data.observed[i][1];
        if (o1 && o2) {
            const double r1 = data.y[i][0] - mu[0];
            const double r2 = data.y[i][1] - mu[1];
            const double quad =
                r1 * (s.i11 * r1 + s.i12 * r2) + r2 * (s.i12 * r1 + s.i22 * r2);
            ll += -0.5 * (quad + std::log(s.det)) - kLog2Pi;
        } else if (o1 || o2) {
            const double var = o1 ? s.s11 : s.s22;
            const double r = (o1 ? data.y[i][0] : data.y[i][1]) - (o1 ? mu[0] : mu[1]);
            ll += -0.5 * (r * r / var + std::log(var) + kLog2Pi);
        }
        // both missing: no observed-data contribution
    }
    return ll;
}

EmResult em_fit(const BivariateData& data, const CompartmentParams& theta_init,
                int em_iters, const OptConfig& opt_config) {
    data.validate();
    if (em_iters < 1) throw ConfigError("impute: em_iters must be >= 1");

    SearchSpace box = SearchSpace::box(3, 0.0, 1.0);
    // theta = 0 exactly makes theta4 undefined; shave the corner
    box.lower = {1e-6, 1e-6, 1e-6};

    EmResult result;
    CompartmentParams theta = theta_init;
    for (int iter = 0; iter < em_iters; ++iter) {
        const EStepResult e = e_step(data, theta);
        const Objective obj =
            Objective::pure("impute-q", [&e, &data](std::span<const double> v) {
                const CompartmentParams p{v[0], v[1], v[2]};
                return -q_function(p, e, data); // engine minimizes
            });
        // identical seed per M-step: a complete dataset reproduces the same
        // theta every iteration
        const OptResult opt = minimize(obj, box, opt_config);
        CompartmentParams next{opt.best_position[0], opt.best_position[1],
                               opt.best_position[2]};
        // the means are invariant under (t1, t2, t3) -> (1 - t1, t3, t2);
        // keep the labeling with t2 <= t3 so iterations do not flip modes
        if (next.theta2 > next.theta3)
            next = CompartmentParams{1.0 - next.theta1, next.theta3, next.theta2};
        // generalized-EM safeguard: never accept a step that lowers the
        // q-value at the current E-step, so the observed-data likelihood
        // stays monotone even when the stochastic M-step under-delivers
        if (q_function(next, e, data) < q_function(theta, e, data)) next = theta;

        EmTraceEntry entry;
        entry.theta = next;
        entry.q_value = q_function(next, e, data) + q_trace_term(e, data);
        entry.observed_loglik = observed_loglik(next, data);
        result.trace.push_back(entry);
        ++result.iterations_run;

        const double move = std::max({std::abs(next.theta1 - theta.theta1),
                                      std::abs(next.theta2 - theta.theta2),
                                      std::abs(next.theta3 - theta.theta3)});
        theta = next;
        if (move < 1e-6) break;
    }

    result.theta = theta;
    result.imputed = e_step(data, theta).filled;
    return result;
}

BivariateData load_csv(const std::string& path,
                       std::array<std::array<double, 2>, 2> sigma) {
    const auto table = csv::read_file(path, true);
    const std::size_t xc = table.column("x");
    const std::size_t y1c = table.column("y1");
    const std::size_t y2c = table.column("y2");
    BivariateData data;
    data.sigma = sigma;
    for (const auto& row : table.rows) {
        const auto x = csv::to_number(row.at(xc));
        if (!x) throw DomainError("impute: missing time value in " + path);
        const auto y1 = csv::to_number(y1c < row.size() ? row.at(y1c) : "");
        const auto y2 = csv::to_number(y2c < row.size() ? row.at(y2c) : "");
        data.x.push_back(*x);
        data.y.push_back({y1.value_or(0.0), y2.value_or(0.0)});
        data.observed.push_back({y1.has_value(), y2.has_value()});
    }
    data.validate();
    return data;
}

std::array<std::array<double, 2>, 2> sigma_from_complete_rows(const BivariateData& data) {
    std::vector<std::array<double, 2>> rows;
    for (std::size_t i = 0; i < data.rows(); ++i)
        if (data.observed[i][0] && data.observed[i][1]) rows.push_back(data.y[i]);
    if (rows.size() < 2) throw DomainError("impute: not enough complete rows for Sigma");
    double m1 = 0.0, m2 = 0.0;
    for (const auto& r : rows) {
        m1 += r[0];
        m2 += r[1];
    }
    m1 /= static_cast<double>(rows.size());
    m2 /= static_cast<double>(rows.size());
    double s11 = 0.0, s12 = 0.0, s22 = 0.0;
    for (const auto& r : rows) {
        s11 += (r[0] - m1) * (r[0] - m1);
        s12 += (r[0] - m1) * (r[1] - m2);
        s22 += (r[1] - m2) * (r[1] - m2);
    }
    const double denom = static_cast<double>(rows.size() - 1);
    return {{{s11 / denom, s12 / denom}, {s12 / denom, s22 / denom}}};
}

BivariateData fixture_table() {
    // nine sampling times; NA cells are masked out
    BivariateData data;
    data.x = {0.33, 2.0, 3.0, 5.0, 8.0, 12.0, 24.0, 48.0, 72.0};
    data.y = {{0.0, 0.03}, {0.84, 0.10}, {0.0, 0.14}, {0.64, 0.0}, {0.55, 0.0},
              {0.0, 0.40}, {0.27, 0.54}, {0.12, 0.66}, {0.06, 0.71}};
    data.observed = {{false, true}, {true, true}, {false, true},
                     {true, false}, {true, false}, {false, true},
                     {true, true},  {true, true},  {true, true}};
    data.sigma = {{{0.075, -0.06}, {-0.06, 0.06}}};
    data.validate();
    return data;
}

BivariateData simulate(const CompartmentParams& truth, std::size_t rows,
                       std::size_t missing, std::array<std::array<double, 2>, 2> sigma,
                       std::uint64_t seed) {
    if (rows < 2) throw ConfigError("impute: need at least two rows");
    if (missing > 2 * rows) throw ConfigError("impute: more missing cells than cells");
    const Sigma2x2 s = decompose(sigma);
    const double rho = s.s12 / std::sqrt(s.s11 * s.s22);
    Rng rng(seed);

    BivariateData data;
    data.sigma = sigma;
    data.x.resize(rows);
    data.y.resize(rows);
    data.observed.assign(rows, {true, true});
    for (std::size_t i = 0; i < rows; ++i) {
        data.x[i] = 0.25 + (40.0 - 0.25) * static_cast<double>(i) /
                               static_cast<double>(rows - 1);
        const auto mu = compartment_means(data.x[i], truth);
        // correlated bivariate normal noise
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        data.y[i][0] = mu[0] + std::sqrt(s.s11) * z1;
        data.y[i][1] = mu[1] + std::sqrt(s.s22) * (rho * z1 + std::sqrt(1.0 - rho * rho) * z2);
    }
    // mask `missing` distinct cells
    std::vector<std::size_t> cells(2 * rows);
    for (std::size_t k = 0; k < cells.size(); ++k) cells[k] = k;
    rng.shuffle(cells);
    for (std::size_t k = 0; k < missing; ++k)
        data.observed[cells[k] / 2][cells[k] % 2] = false;
    return data;
}

} // namespace swarmstat::impute
