#include "swarmstat/benchmarks.hpp"

#include <cmath>

#include "swarmstat/errors.hpp"
#include "swarmstat/random.hpp"

namespace swarmstat::bench {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;
constexpr int kWeierstrassKMax = 20;
constexpr double kWeierstrassA = 0.5;
constexpr double kWeierstrassB = 3.0;

} // namespace

double weierstrass(std::span<const double> x) {
    // per-dimension offset term sum_k a^k cos(pi b^k), constant in x
    double offset = 0.0;
    {
        double ak = 1.0, bk = 1.0;
        for (int k = 0; k <= kWeierstrassKMax; ++k) {
            offset += ak * std::cos(kPi * bk);
            ak *= kWeierstrassA;
            bk *= kWeierstrassB;
        }
    }
    double total = 0.0;
    for (const double xi : x) {
        double ak = 1.0, bk = 1.0;
        double s = 0.0;
        for (int k = 0; k <= kWeierstrassKMax; ++k) {
            s += ak * std::cos(kTwoPi * bk * (xi + 0.5));
            ak *= kWeierstrassA;
            bk *= kWeierstrassB;
        }
        total += s;
    }
    return total - static_cast<double>(x.size()) * offset;
}

double quartic(std::span<const double> x) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - 1.0;
        const double d2 = d * d;
        total += static_cast<double>(i + 1) * d2 * d2;
    }
    return total;
}

double ackley(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    double sq = 0.0, cs = 0.0;
    for (const double xi : x) {
        sq += xi * xi;
        cs += std::cos(kTwoPi * xi);
    }
    return -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + 20.0 +
           std::exp(1.0);
}

std::vector<double> DynamicEnv::center(std::uint64_t eval_index) const {
    const std::uint64_t epoch = (change_period == 0) ? 0 : eval_index / change_period;
    Rng rng(mix_seed(seed ^ mix_seed(epoch)));
    std::vector<double> c(box.dim());
    for (std::size_t q = 0; q < c.size(); ++q)
        c[q] = rng.uniform(box.lower[q], box.upper[q]);
    return c;
}

double dynamic_sphere(std::span<const double> x, std::uint64_t eval_index,
                      const DynamicEnv& env) {
    const std::vector<double> c = env.center(eval_index);
    double total = 0.0;
    for (std::size_t q = 0; q < x.size(); ++q) {
        const double d = x[q] - c[q];
        total += d * d;
    }
    return total;
}

BenchmarkSpec make_benchmark(const std::string& name, std::size_t dim) {
    if (dim == 0) throw ConfigError("benchmark dimension must be positive");
    BenchmarkSpec spec;
    spec.dim = dim;

    if (name == "weierstrass" || name == "f9") {
        spec.name = "weierstrass";
        spec.space = SearchSpace::box(dim, -0.5, 0.5);
        spec.objective = Objective::pure("weierstrass", weierstrass).with_known_optimum(0.0);
        spec.known_optimizer = std::vector<double>(dim, 0.0);
    } else if (name == "quartic" || name == "f10") {
        spec.name = "quartic";
        spec.space = SearchSpace::box(dim, -2.0, 2.0);
        spec.objective = Objective::pure("quartic", quartic).with_known_optimum(0.0);
        spec.known_optimizer = std::vector<double>(dim, 1.0);
    } else if (name == "ackley" || name == "f11") {
        spec.name = "ackley";
        spec.space = SearchSpace::box(dim, -32.0, 32.0);
        spec.objective = Objective::pure("ackley", ackley).with_known_optimum(0.0);
        spec.known_optimizer = std::vector<double>(dim, 0.0);
    } else if (name == "dynamic-sphere" || name == "dynamic_sphere" || name == "f12") {
        spec.name = "dynamic-sphere";
        spec.space = SearchSpace::box(dim, -50.0, 50.0);
        DynamicEnv env{spec.space, 1000, 20220401};
        spec.objective = Objective::dynamic(
            "dynamic-sphere", [env](std::span<const double> x, std::uint64_t e) {
                return dynamic_sphere(x, e, env);
            });
        spec.objective.with_known_optimum(0.0);
    } else if (name == "sphere") {
        spec.name = "sphere";
        spec.space = SearchSpace::box(dim, -5.0, 5.0);
        spec.objective = Objective::pure("sphere", [](std::span<const double> x) {
                             double s = 0.0;
                             for (const double xi : x) s += xi * xi;
                             return s;
                         }).with_known_optimum(0.0);
        spec.known_optimizer = std::vector<double>(dim, 0.0);
    } else {
        throw ConfigError("unknown benchmark: " + name);
    }
    spec.known_optimum_value = 0.0;
    return spec;
}

std::vector<std::string> benchmark_names() {
    return {"weierstrass", "quartic", "ackley", "dynamic-sphere", "sphere"};
}

} // namespace swarmstat::bench
