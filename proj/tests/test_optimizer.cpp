#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "swarmstat/benchmarks.hpp"
#include "swarmstat/errors.hpp"
#include "swarmstat/optimizer.hpp"

using namespace swarmstat;

namespace {

Objective sphere_objective() {
    return Objective::pure("sphere", [](std::span<const double> x) {
        double s = 0.0;
        for (const double xi : x) s += xi * xi;
        return s;
    });
}

// Independent transcript oracle: replays the documented RNG protocol and
// computes every position/velocity with its own arithmetic.
struct Replay {
    struct P {
        std::vector<double> x, v;
        double f;
    };
    std::vector<P> ps;
    Rng rng;
    const SearchSpace& space;
    double phi;

    Replay(std::uint64_t seed, int n, const SearchSpace& sp, double phi_)
        : rng(seed), space(sp), phi(phi_) {
        const std::size_t d = sp.dim();
        ps.resize(static_cast<std::size_t>(n));
        for (auto& p : ps) {
            p.x.resize(d);
            p.v.resize(d);
            for (std::size_t q = 0; q < d; ++q)
                p.x[q] = sp.lower[q] + (sp.upper[q] - sp.lower[q]) * rng.uniform();
            for (std::size_t q = 0; q < d; ++q) {
                const double w = sp.upper[q] - sp.lower[q];
                p.v[q] = -w + 2.0 * w * rng.uniform();
            }
        }
        for (auto& p : ps) p.f = eval(p.x);
    }

    double eval(const std::vector<double>& x) const {
        double s = 0.0;
        for (const double xi : x) s += xi * xi;
        return s;
    }

    void step_without_mutation() {
        const std::size_t d = space.dim();
        std::vector<double> center(d, 0.0);
        for (const auto& p : ps)
            for (std::size_t q = 0; q < d; ++q) center[q] += p.x[q];
        for (std::size_t q = 0; q < d; ++q) center[q] /= static_cast<double>(ps.size());

        std::vector<int> order(ps.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        rng.shuffle(order);

        for (std::size_t k = 0; k < ps.size() / 2; ++k) {
            const int a = order[2 * k], b = order[2 * k + 1];
            const int w = (ps[static_cast<std::size_t>(b)].f < ps[static_cast<std::size_t>(a)].f) ? b : a;
            const int l = (w == a) ? b : a;
            auto& lp = ps[static_cast<std::size_t>(l)];
            const auto& wp = ps[static_cast<std::size_t>(w)];
            std::vector<double> r1(d), r2(d), r3(d);
            for (std::size_t q = 0; q < d; ++q) r1[q] = rng.uniform();
            for (std::size_t q = 0; q < d; ++q) r2[q] = rng.uniform();
            for (std::size_t q = 0; q < d; ++q) r3[q] = rng.uniform();
            for (std::size_t q = 0; q < d; ++q) {
                lp.v[q] = r1[q] * lp.v[q] + r2[q] * (wp.x[q] - lp.x[q]) +
                          phi * r3[q] * (center[q] - lp.x[q]);
                lp.x[q] += lp.v[q];
                if (lp.x[q] < space.lower[q]) {
                    lp.x[q] = space.lower[q];
                    lp.v[q] = 0.0;
                } else if (lp.x[q] > space.upper[q]) {
                    lp.x[q] = space.upper[q];
                    lp.v[q] = 0.0;
                }
            }
            lp.f = eval(lp.x);
        }
    }
};

} // namespace

TEST_SUITE_BEGIN("optimizer");

TEST_CASE("pair update matches the RNG-replay transcript oracle (4 particles, 2-D)") {
    SearchSpace space = SearchSpace::box(2, -3.0, 3.0);
    OptConfig config;
    config.swarm_size = 4;
    config.algorithm = Algorithm::cso; // pure pair update, no mutation
    config.seed = 777;
    config.max_evals = 1000;

    CsoEngine engine(sphere_objective(), space, config);
    Replay oracle(777, 4, space, config.phi);

    for (int i = 0; i < 4; ++i) {
        const auto pos = engine.position(i);
        for (std::size_t q = 0; q < 2; ++q) CHECK(pos[q] == oracle.ps[static_cast<std::size_t>(i)].x[q]);
    }

    for (int iter = 0; iter < 3; ++iter) {
        engine.step();
        oracle.step_without_mutation();
        for (int i = 0; i < 4; ++i) {
            const auto pos = engine.position(i);
            for (std::size_t q = 0; q < 2; ++q)
                CHECK(pos[q] == oracle.ps[static_cast<std::size_t>(i)].x[q]);
            CHECK(engine.fitness(i) == oracle.ps[static_cast<std::size_t>(i)].f);
        }
    }
}

TEST_CASE("coincident loser, winner, and center is a fixed point") {
    SearchSpace space = SearchSpace::box(3, -5.0, 5.0);
    Particle loser;
    loser.position = {1.0, -2.0, 0.5};
    loser.velocity = {0.0, 0.0, 0.0};
    Particle winner = loser;
    const std::vector<double> center = loser.position;
    const std::vector<double> r1 = {0.3, 0.9, 0.1}, r2 = {0.5, 0.2, 0.8},
                              r3 = {0.7, 0.4, 0.6};
    cso_loser_update(loser, winner, center, 0.3, space, r1, r2, r3);
    CHECK(loser.position == winner.position);
    CHECK(loser.velocity == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("phi defaults to 0.3") { CHECK(OptConfig{}.phi == 0.3); }

TEST_CASE("mutation picks coordinates uniformly and sends them to a bound") {
    SearchSpace space = SearchSpace::box(10, -5.0, 5.0);
    OptConfig config;
    config.swarm_size = 4;
    config.algorithm = Algorithm::cso_ma;
    config.seed = 20240101;
    config.max_evals = 4 + 10000 * 3 + 3;
    config.tolerance = 0.0;

    CsoEngine engine(sphere_objective(), space, config);
    std::vector<int> counts(10, 0);
    int boundary_hits = 0;
    for (int iter = 0; iter < 10000; ++iter) {
        const StepInfo info = engine.step();
        REQUIRE(info.mutated >= 0);
        REQUIRE(info.mutated_coord >= 0);
        ++counts[static_cast<std::size_t>(info.mutated_coord)];
        const auto pos = engine.position(info.mutated);
        const std::size_t q = static_cast<std::size_t>(info.mutated_coord);
        if (pos[q] == -5.0 || pos[q] == 5.0) ++boundary_hits;
    }
    for (int q = 0; q < 10; ++q) {
        const double freq = counts[static_cast<std::size_t>(q)] / 10000.0;
        CHECK(freq == doctest::Approx(0.1).epsilon(0.1)); // 0.1 +- 0.01
    }
    CHECK(boundary_hits == 10000);
}

TEST_CASE("1-D mutation lands exactly on -5 or +5") {
    SearchSpace space = SearchSpace::box(1, -5.0, 5.0);
    OptConfig config;
    config.swarm_size = 4;
    config.algorithm = Algorithm::cso_ma;
    config.seed = 5;
    config.max_evals = 4000;
    config.tolerance = 0.0;
    CsoEngine engine(sphere_objective(), space, config);
    for (int iter = 0; iter < 50; ++iter) {
        const StepInfo info = engine.step();
        const auto pos = engine.position(info.mutated);
        CHECK((pos[0] == -5.0 || pos[0] == 5.0));
    }
}

TEST_CASE("sphere D=10 converges below 1e-4 within 10k evals") {
    const auto b = bench::make_benchmark("sphere", 10);
    OptConfig config;
    config.swarm_size = 40;
    config.phi = 0.0; // no center pull needed on a unimodal bowl
    config.max_evals = 10000;
    config.seed = 42;
    config.tolerance = 0.0;
    const OptResult r = minimize(b.objective, b.space, config);
    CHECK(r.best_value < 1e-4);
    CHECK(r.evals_used <= 10000);
}

TEST_CASE("identical seed and config give identical traces") {
    const auto b = bench::make_benchmark("ackley", 5);
    OptConfig config;
    config.swarm_size = 20;
    config.max_evals = 3000;
    config.seed = 99;
    for (const Algorithm algo : {Algorithm::cso_ma, Algorithm::cso, Algorithm::pso}) {
        config.algorithm = algo;
        const OptResult a = minimize(b.objective, b.space, config);
        const OptResult c = minimize(b.objective, b.space, config);
        CHECK(a.trace == c.trace);
        CHECK(a.best_position == c.best_position);
        CHECK(a.best_value == c.best_value);
        CHECK(a.evals_used == c.evals_used);
    }
}

TEST_CASE("pso solves sphere D=2 below 1e-6 within 5k evals") {
    const auto b = bench::make_benchmark("sphere", 2);
    OptConfig config;
    config.swarm_size = 30;
    config.max_evals = 5000;
    config.seed = 7;
    config.tolerance = 0.0;
    const OptResult r = pso_minimize(b.objective, b.space, config);
    CHECK(r.best_value < 1e-6);
}

TEST_CASE("configuration errors") {
    const auto b = bench::make_benchmark("sphere", 3);
    OptConfig config;
    config.swarm_size = 5; // odd
    CHECK_THROWS_AS(minimize(b.objective, b.space, config), ConfigError);
    config.swarm_size = 8;
    config.max_evals = 7; // below one init sweep
    CHECK_THROWS_AS(minimize(b.objective, b.space, config), ConfigError);
}

TEST_CASE("non-finite objective values surface as EvalError with the position") {
    SearchSpace space = SearchSpace::box(2, -1.0, 1.0);
    Objective bad = Objective::pure("bad", [](std::span<const double>) {
        return std::numeric_limits<double>::quiet_NaN();
    });
    OptConfig config;
    config.swarm_size = 4;
    config.max_evals = 100;
    try {
        minimize(bad, space, config);
        FAIL("expected EvalError");
    } catch (const EvalError& e) {
        CHECK(e.position().size() == 2);
    }
}

TEST_CASE("improvement window stops a stagnant run before the budget") {
    SearchSpace space = SearchSpace::box(2, -1.0, 1.0);
    Objective flat = Objective::pure("flat", [](std::span<const double>) { return 1.0; });
    OptConfig config;
    config.swarm_size = 4;
    config.max_evals = 100000;
    config.tolerance = 1e-5;
    config.window = 20;
    const OptResult r = minimize(flat, space, config);
    CHECK(r.iterations <= 25);
    CHECK(r.evals_used < 1000);
}

TEST_CASE("engine invariants over randomized mixed-kind runs") {
    Rng meta(314159);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t d = 2 + meta.below(4);
        SearchSpace space;
        space.lower.resize(d);
        space.upper.resize(d);
        space.kind.resize(d);
        for (std::size_t q = 0; q < d; ++q) {
            const auto k = meta.below(3);
            if (k == 0) {
                space.kind[q] = CoordKind::continuous;
                space.lower[q] = -2.0 - meta.uniform();
                space.upper[q] = 1.0 + meta.uniform();
            } else if (k == 1) {
                space.kind[q] = CoordKind::integer;
                space.lower[q] = -4.0;
                space.upper[q] = 6.0;
            } else {
                space.kind[q] = CoordKind::binary;
                space.lower[q] = -1.0;
                space.upper[q] = 1.0;
            }
        }
        OptConfig config;
        config.swarm_size = 4 + 2 * static_cast<int>(meta.below(4));
        config.algorithm = (trial % 2 == 0) ? Algorithm::cso_ma : Algorithm::cso;
        config.seed = meta.bits();
        config.max_evals = 5000;
        config.tolerance = 0.0;

        CsoEngine engine(sphere_objective(), space, config);
        const std::size_t n = engine.size();
        double last_incumbent = engine.incumbent_value();
        for (int iter = 0; iter < 60 && engine.budget_allows_step(); ++iter) {
            std::vector<std::vector<double>> before(n);
            for (std::size_t i = 0; i < n; ++i) before[i] = engine.position(static_cast<int>(i));
            const StepInfo info = engine.step();

            // pairing covers every particle exactly once
            std::set<int> seen;
            for (const int w : info.winners) seen.insert(w);
            for (const int l : info.losers) seen.insert(l);
            CHECK(seen.size() == n);
            CHECK(info.winners.size() == n / 2);

            // winners immutable, bit for bit
            for (const int w : info.winners)
                CHECK(engine.position(w) == before[static_cast<std::size_t>(w)]);

            // evaluation accounting: one eval per loser plus the mutation re-eval
            const std::uint64_t expect =
                info.losers.size() + (config.algorithm == Algorithm::cso_ma ? 1 : 0);
            CHECK(info.evals_after - info.evals_before == expect);

            // bound feasibility and kind repair of every observable position
            for (std::size_t i = 0; i < n; ++i) {
                const auto pos = engine.position(static_cast<int>(i));
                for (std::size_t q = 0; q < d; ++q) {
                    CHECK(pos[q] >= space.lower[q]);
                    CHECK(pos[q] <= space.upper[q]);
                    if (space.kind[q] == CoordKind::integer)
                        CHECK(pos[q] == std::round(pos[q]));
                    if (space.kind[q] == CoordKind::binary)
                        CHECK((pos[q] == -1.0 || pos[q] == 1.0));
                }
            }

            // incumbent monotone
            CHECK(engine.incumbent_value() <= last_incumbent);
            last_incumbent = engine.incumbent_value();
        }
    }
}

TEST_SUITE_END();
