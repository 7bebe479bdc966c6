#include "swarmstat/rasch.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "swarmstat/csv.hpp"
#include "swarmstat/errors.hpp"
#include "swarmstat/random.hpp"

namespace swarmstat::rasch {

namespace {

constexpr double kSqrtPi = 1.7724538509055160272981674833411452;

double log_logistic(double x) {
    // log(1 / (1 + e^{-x})) without overflow
    return (x >= 0.0) ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

} // namespace

void ResponseData::validate() const {
    if (responses.empty()) throw DomainError("rasch: no persons");
    const std::size_t i = responses[0].size();
    if (i == 0) throw DomainError("rasch: no items");
    for (const auto& row : responses) {
        if (row.size() != i) throw DomainError("rasch: ragged response matrix");
        for (const double v : row)
            if (v != 0.0 && v != 1.0)
                throw DomainError("rasch: responses must be strictly binary");
    }
}

double item_prob(double theta, double beta_i) {
    const double x = theta - beta_i;
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Quadrature gauss_hermite(int n) {
    if (n < 1) throw DomainError("rasch: quadrature needs at least one node");
    // Golub-Welsch: eigendecomposition of the Jacobi matrix for the Hermite
    // recurrence, off-diagonals sqrt(k/2)
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double off = std::sqrt(static_cast<double>(k) / 2.0);
        jacobi(k, k - 1) = off;
        jacobi(k - 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    Quadrature q;
    q.nodes.resize(static_cast<std::size_t>(n));
    q.weights.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        q.nodes[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
        const double v0 = solver.eigenvectors()(0, k);
        q.weights[static_cast<std::size_t>(k)] = kSqrtPi * v0 * v0;
    }
    return q;
}

double marginal_nll(const Params& p, const ResponseData& data, int nodes) {
    data.validate();
    if (p.sigma2 <= 0.0) throw DomainError("rasch: sigma2 must be positive");
    if (nodes < 5) throw DomainError("rasch: need at least 5 quadrature nodes");
    if (p.beta.size() != data.items())
        throw DomainError("rasch: beta length does not match item count");

    const Quadrature q = gauss_hermite(nodes);
    const double scale = std::sqrt(2.0 * p.sigma2);
    const std::size_t kn = q.nodes.size();

    // per-node log-probabilities of a correct answer, shared across persons
    std::vector<double> log_p(kn * data.items());
    std::vector<double> log_1mp(kn * data.items());
    for (std::size_t k = 0; k < kn; ++k) {
        const double theta = scale * q.nodes[k];
        for (std::size_t i = 0; i < data.items(); ++i) {
            const double x = theta - p.beta[i];
            log_p[k * data.items() + i] = log_logistic(x);
            log_1mp[k * data.items() + i] = log_logistic(-x);
        }
    }
    std::vector<double> log_w(kn);
    for (std::size_t k = 0; k < kn; ++k) log_w[k] = std::log(q.weights[k]);

    double nll = 0.0;
    std::vector<double> terms(kn);
    for (const auto& row : data.responses) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < kn; ++k) {
            double s = log_w[k];
            const double* lp = &log_p[k * data.items()];
            const double* lq = &log_1mp[k * data.items()];
            for (std::size_t i = 0; i < data.items(); ++i)
                s += (row[i] == 1.0) ? lp[i] : lq[i];
            terms[k] = s;
            m = std::max(m, s);
        }
        double acc = 0.0;
        for (std::size_t k = 0; k < kn; ++k) acc += std::exp(terms[k] - m);
        // person marginal = (1/sqrt(pi)) sum_k w_k prod_i ...
        nll -= m + std::log(acc) - std::log(kSqrtPi);
    }
    return nll;
}

SearchSpace parameter_space(const ResponseData& data) {
    data.validate();
    const std::size_t dim = data.items() + 1;
    SearchSpace s;
    s.lower.assign(dim, -6.0);
    s.upper.assign(dim, 6.0);
    s.lower[dim - 1] = 1e-3;
    s.upper[dim - 1] = 25.0;
    s.validate();
    return s;
}

Params params_from_vector(std::span<const double> x) {
    Params p;
    p.beta.assign(x.begin(), x.end() - 1);
    p.sigma2 = x.back();
    return p;
}

Objective make_objective(const ResponseData& data, int nodes) {
    return Objective::pure("rasch-nll", [data, nodes](std::span<const double> x) {
        return marginal_nll(params_from_vector(x), data, nodes);
    });
}

ResponseData load_csv(const std::string& path) {
    const auto table = csv::read_file(path, false);
    ResponseData data;
    for (const auto& row : table.rows) {
        std::vector<double> r;
        r.reserve(row.size());
        for (const auto& cell : row) {
            const auto v = csv::to_number(cell);
            if (!v) throw DomainError("rasch: missing entry in " + path);
            r.push_back(*v);
        }
        data.responses.push_back(std::move(r));
    }
    data.validate();
    return data;
}

ResponseData simulate(const Params& truth, std::size_t persons, std::uint64_t seed) {
    Rng rng(seed);
    ResponseData data;
    data.responses.resize(persons);
    const double sd = std::sqrt(truth.sigma2);
    for (auto& row : data.responses) {
        const double theta = sd * rng.normal();
        row.resize(truth.beta.size());
        for (std::size_t i = 0; i < truth.beta.size(); ++i)
            row[i] = (rng.uniform() < item_prob(theta, truth.beta[i])) ? 1.0 : 0.0;
    }
    return data;
}

} // namespace swarmstat::rasch
