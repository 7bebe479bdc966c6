#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "swarmstat/errors.hpp"
#include "swarmstat/optimizer.hpp"
#include "swarmstat/random.hpp"
#include "swarmstat/scgtm.hpp"

using namespace swarmstat;
using namespace swarmstat::scgtm;

namespace {

// scalar oracle for one cell's negative log-likelihood, straight from the
// model definition with no log-space tricks
double cell_nll_oracle(double y, double t, const Params& p) {
    const double k = (t <= p.t0) ? p.k1 : p.k2;
    const double tau = std::exp(p.b + p.mu_mag * std::exp(-k * (t - p.t0) * (t - p.t0))) - 1.0;
    const double pc = 1.0 / (1.0 + std::exp(-(p.alpha * std::log(tau + 1.0) + p.beta)));
    const double f = std::pow(tau / (p.phi + tau), y) *
                     std::tgamma(p.phi + y) / (std::tgamma(p.phi) * std::tgamma(y + 1.0)) *
                     std::pow(1.0 + tau / p.phi, -p.phi);
    const double lik = (1.0 - pc) * f + (y == 0.0 ? pc : 0.0);
    return -std::log(std::max(lik, 1e-300));
}

Params demo_params() {
    Params p;
    p.mu_mag = 2.0;
    p.k1 = 3.0;
    p.k2 = 5.0;
    p.t0 = 0.45;
    p.phi = 4.0;
    p.alpha = -0.5;
    p.beta = -1.5;
    return p;
}

} // namespace

TEST_SUITE_BEGIN("scgtm");

TEST_CASE("hill mean: branches coincide at the peak") {
    Params p = demo_params();
    const double at_peak = hill_mean(p.t0, p);
    CHECK(at_peak == doctest::Approx(std::exp(p.b + p.mu_mag) - 1.0).epsilon(1e-14));
    p.k1 = 100.0;
    p.k2 = 0.1;
    CHECK(hill_mean(p.t0, p) == doctest::Approx(at_peak).epsilon(1e-14));
}

TEST_CASE("hill mean: zero curvature gives a flat trend") {
    Params p = demo_params();
    p.k1 = 0.0;
    p.k2 = 0.0;
    const double v = hill_mean(0.0, p);
    for (const double t : {0.1, 0.45, 0.77, 1.0})
        CHECK(hill_mean(t, p) == doctest::Approx(v).epsilon(1e-14));
}

TEST_CASE("hill mean: scalar oracle point") {
    Params p;
    p.mu_mag = 1.0;
    p.k1 = 2.0;
    p.k2 = 7.0;
    p.t0 = 0.5;
    const double expect = std::exp(std::exp(-2.0 * 0.04)) - 1.0; // t = 0.3 branch
    CHECK(hill_mean(0.3, p) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("zero-inflation link") {
    Params p;
    p.alpha = 0.0;
    p.beta = 0.0;
    CHECK(zero_inflation_prob(3.7, p) == doctest::Approx(0.5));
    p.beta = -2.0;
    CHECK(zero_inflation_prob(0.0, p) ==
          doctest::Approx(1.0 / (1.0 + std::exp(2.0))).epsilon(1e-12));
    // monotone in beta for fixed tau
    double last = 0.0;
    for (double b = -4.0; b <= 4.0; b += 0.5) {
        p.beta = b;
        const double v = zero_inflation_prob(1.0, p);
        CHECK(v > last);
        last = v;
    }
}

TEST_CASE("nll matches the scalar oracle cell by cell") {
    const Params p = demo_params();
    CellData one;
    one.y = {0.0};
    one.t = {0.3};
    CHECK(nll(p, one) == doctest::Approx(cell_nll_oracle(0.0, 0.3, p)).epsilon(1e-10));

    Rng rng(99);
    CellData data;
    for (int c = 0; c < 30; ++c) {
        data.t.push_back(rng.uniform());
        data.y.push_back(std::floor(rng.uniform(0.0, 12.0)));
    }
    double expect = 0.0;
    for (std::size_t c = 0; c < data.cells(); ++c)
        expect += cell_nll_oracle(data.y[c], data.t[c], p);
    CHECK(nll(p, data) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("duplicating the data doubles the nll") {
    const Params p = demo_params();
    CellData data = synthesize(p, 40, 7);
    CellData doubled = data;
    doubled.y.insert(doubled.y.end(), data.y.begin(), data.y.end());
    doubled.t.insert(doubled.t.end(), data.t.begin(), data.t.end());
    CHECK(nll(p, doubled) == doctest::Approx(2.0 * nll(p, data)).epsilon(1e-12));
}

TEST_CASE("nll is non-negative and order-independent") {
    const Params p = demo_params();
    CellData data = synthesize(p, 200, 11);
    const double base = nll(p, data);
    CHECK(base >= 0.0);

    Rng rng(5);
    std::vector<std::size_t> idx(data.cells());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (int shuffle = 0; shuffle < 5; ++shuffle) {
        rng.shuffle(idx);
        CellData perm;
        for (const std::size_t i : idx) {
            perm.y.push_back(data.y[i]);
            perm.t.push_back(data.t[i]);
        }
        CHECK(std::abs(nll(p, perm) - base) < 1e-10);
    }
}

TEST_CASE("finite-difference Richardson ratio is ~4 on continuous coordinates") {
    const Params truth = demo_params();
    const CellData data = synthesize(truth, 60, 21);
    Rng rng(17);
    // coordinates: mu_mag k1 k2 t0 alpha beta (phi stays integer-fixed)
    for (int trial = 0; trial < 6; ++trial) {
        Params p;
        p.mu_mag = rng.uniform(1.0, 2.5);
        p.k1 = rng.uniform(0.5, 6.0);
        p.k2 = rng.uniform(0.5, 6.0);
        p.t0 = 0.3712 + 0.1 * rng.uniform(); // avoids the sampled pseudotimes
        p.phi = 5.0;
        p.alpha = rng.uniform(-1.0, 1.0);
        p.beta = rng.uniform(-2.0, 0.0);

        auto eval_shifted = [&](int coord, double delta) {
            Params q = p;
            switch (coord) {
            case 0: q.mu_mag += delta; break;
            case 1: q.k1 += delta; break;
            case 2: q.k2 += delta; break;
            case 3: q.alpha += delta; break;
            case 4: q.beta += delta; break;
            }
            return nll(q, data);
        };
        for (int coord = 0; coord < 5; ++coord) {
            const double h = 1e-2;
            auto central = [&](double step) {
                return (eval_shifted(coord, step) - eval_shifted(coord, -step)) /
                       (2.0 * step);
            };
            const double d1 = central(h), d2 = central(h / 2.0), d4 = central(h / 4.0);
            const double num = d1 - d2, den = d2 - d4;
            if (std::abs(den) < 1e-9) continue; // derivative already converged
            CHECK(num / den == doctest::Approx(4.0).epsilon(0.125)); // 4 +- 0.5
        }
    }
}

TEST_CASE("parameter space follows the data") {
    CellData data;
    data.y = {0.0, 7.0};
    data.t = {0.1, 0.9};
    const SearchSpace s = parameter_space(data);
    CHECK(s.dim() == 7);
    CHECK(s.lower[0] == doctest::Approx(0.0));
    CHECK(s.upper[0] == doctest::Approx(std::log(8.0)));
    CHECK(s.lower[1] == 0.0);
    CHECK(s.upper[1] == 500.0);
    CHECK(s.lower[3] == doctest::Approx(0.1));
    CHECK(s.upper[3] == doctest::Approx(0.9));
    CHECK(s.kind[4] == CoordKind::integer);
    CHECK(s.lower[4] == 1.0);
    CHECK(s.upper[4] == 100.0);

    CellData zeros;
    zeros.y = {0.0, 0.0};
    zeros.t = {0.1, 0.9};
    CHECK_THROWS_AS(parameter_space(zeros), DomainError);
}

TEST_CASE("baseline estimation appends one bounded coordinate") {
    CellData data;
    data.y = {0.0, 3.0, 9.0};
    data.t = {0.1, 0.5, 0.9};
    const SearchSpace fixed = parameter_space(data, false);
    const SearchSpace with_b = parameter_space(data, true);
    CHECK(fixed.dim() == 7);
    CHECK(with_b.dim() == 8);
    CHECK(with_b.lower[7] == -5.0);
    CHECK(with_b.upper[7] == 5.0);

    const std::vector<double> x{1.0, 2.0, 3.0, 0.4, 5.0, -0.5, 0.5, 1.25};
    const Params p = params_from_vector(x, true);
    CHECK(p.b == 1.25);
    const Params p0 = params_from_vector(std::span<const double>(x).first(7), false);
    CHECK(p0.b == 0.0);
    // a nonzero baseline shifts the flat-trend mean accordingly
    Params flat = p;
    flat.k1 = flat.k2 = 0.0;
    CHECK(hill_mean(0.3, flat) ==
          doctest::Approx(std::exp(1.25 + flat.mu_mag) - 1.0).epsilon(1e-14));
}

TEST_CASE("cso-ma fit beats the generating parameters in-sample") {
    const Params truth = demo_params();
    const CellData data = synthesize(truth, 500, 3);
    const double truth_nll = nll(truth, data);

    OptConfig config;
    config.swarm_size = 20;
    config.max_evals = 30000;
    config.seed = 12;
    config.tolerance = 0.0;
    const OptResult fit = minimize(make_objective(data), parameter_space(data), config);
    CHECK(fit.best_value <= truth_nll + 1e-3);
}

TEST_CASE("csv loader round-trips a gene file") {
    const Params truth = demo_params();
    const CellData data = synthesize(truth, 25, 31);
    const std::string path = "scgtm_test_gene.csv";
    {
        std::ofstream out(path);
        out.precision(17);
        out << "t,y\n";
        for (std::size_t c = 0; c < data.cells(); ++c)
            out << data.t[c] << "," << data.y[c] << "\n";
    }
    const CellData loaded = load_csv(path);
    REQUIRE(loaded.cells() == data.cells());
    for (std::size_t c = 0; c < data.cells(); ++c) {
        CHECK(loaded.y[c] == data.y[c]);
        CHECK(loaded.t[c] == doctest::Approx(data.t[c]).epsilon(1e-12));
    }
    std::remove(path.c_str());
}

TEST_SUITE_END();
