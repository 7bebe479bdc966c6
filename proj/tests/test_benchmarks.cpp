#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "swarmstat/benchmarks.hpp"
#include "swarmstat/random.hpp"

using namespace swarmstat;
using namespace swarmstat::bench;

namespace {

// independent long-double summation oracle for the Weierstrass sum
long double weierstrass_oracle_1d(long double x) {
    long double s = 0.0L, m = 0.0L;
    for (int k = 20; k >= 0; --k) { // reversed association order on purpose
        const long double ak = std::pow(0.5L, static_cast<long double>(k));
        const long double bk = std::pow(3.0L, static_cast<long double>(k));
        s += ak * std::cos(2.0L * 3.14159265358979323846264338327950288L * bk * (x + 0.5L));
        m += ak * std::cos(3.14159265358979323846264338327950288L * bk);
    }
    return s - m;
}

} // namespace

TEST_SUITE_BEGIN("benchmarks");

TEST_CASE("known optima") {
    for (const std::size_t d : {1u, 3u, 10u}) {
        const std::vector<double> zeros(d, 0.0);
        const std::vector<double> ones(d, 1.0);
        CHECK(std::abs(weierstrass(zeros)) < 1e-10);
        CHECK(std::abs(quartic(ones)) < 1e-10);
        CHECK(std::abs(ackley(zeros)) < 1e-10);
    }
}

TEST_CASE("weierstrass 1-D matches the independent summation oracle") {
    for (const double x : {0.2, -0.37, 0.499, -0.5, 0.0, 0.11}) {
        const std::vector<double> v{x};
        const double expect = static_cast<double>(weierstrass_oracle_1d(x));
        CHECK(weierstrass(v) == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("weierstrass is permutation invariant") {
    std::vector<double> x{0.1, -0.3, 0.42, 0.05};
    const double base = weierstrass(x);
    std::sort(x.begin(), x.end());
    do {
        CHECK(weierstrass(x) == doctest::Approx(base).epsilon(1e-12));
    } while (std::next_permutation(x.begin(), x.end()));
}

TEST_CASE("quartic hand values and symmetry") {
    CHECK(quartic(std::vector<double>{0.0, 0.0}) == doctest::Approx(3.0));
    for (const double t : {0.1, 0.5, 0.9}) {
        const std::vector<double> a{1.0 + t};
        const std::vector<double> b{1.0 - t};
        CHECK(quartic(a) == doctest::Approx(quartic(b)).epsilon(1e-14));
    }
}

TEST_CASE("ackley closed-form value at (1, 1) and permutation invariance") {
    const double expect = 20.0 * (1.0 - std::exp(-0.2));
    CHECK(ackley(std::vector<double>{1.0, 1.0}) == doctest::Approx(expect).epsilon(1e-12));

    const std::vector<double> x{3.0, -7.5, 12.0};
    const std::vector<double> y{12.0, 3.0, -7.5};
    CHECK(ackley(x) == doctest::Approx(ackley(y)).epsilon(1e-13));
}

TEST_CASE("weierstrass and ackley are non-negative on their boxes") {
    Rng rng(8675309);
    for (int trial = 0; trial < 100000; ++trial) {
        const std::size_t d = 1 + rng.below(6);
        std::vector<double> xw(d), xa(d);
        for (std::size_t q = 0; q < d; ++q) {
            xw[q] = rng.uniform(-0.5, 0.5);
            xa[q] = rng.uniform(-32.0, 32.0);
        }
        CHECK(weierstrass(xw) >= -1e-12);
        CHECK(ackley(xa) >= -1e-12);
    }
}

TEST_CASE("dynamic sphere: zero at its own center, static when period is off") {
    DynamicEnv env{SearchSpace::box(4, -50.0, 50.0), 100, 99};
    const auto c0 = env.center(0);
    CHECK(dynamic_sphere(c0, 0, env) == 0.0);
    CHECK(dynamic_sphere(c0, 99, env) == 0.0);   // same epoch
    const auto c1 = env.center(100);
    CHECK(c1 != c0);                             // schedule moved

    DynamicEnv frozen{SearchSpace::box(4, -50.0, 50.0), 0, 99};
    const auto f0 = frozen.center(0);
    for (const std::uint64_t e : {0ull, 1000ull, 123456ull})
        CHECK(frozen.center(e) == f0);
}

TEST_CASE("registry instantiates every listed benchmark at its optimizer") {
    for (const auto& name : benchmark_names()) {
        const auto spec = make_benchmark(name, 5);
        CHECK(spec.space.dim() == 5);
        if (spec.known_optimizer) {
            const double v = spec.objective(*spec.known_optimizer, 0);
            CHECK(std::abs(v - spec.known_optimum_value) < 1e-10);
        }
    }
    CHECK_THROWS(make_benchmark("rosenbrock", 3));
}

TEST_SUITE_END();
