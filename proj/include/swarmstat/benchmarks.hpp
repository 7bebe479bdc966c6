#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarmstat/objective.hpp"
#include "swarmstat/search_space.hpp"

namespace swarmstat::bench {

/// Weierstrass sum (a = 0.5, b = 3, k_max = 20) on [-0.5, 0.5]^D, minimum 0 at 0.
double weierstrass(std::span<const double> x);

/// Deterministic shifted quartic sum_i i * (x_i - 1)^4 on [-2, 2]^D, minimum 0
/// at the all-ones vector. The classical quartic carries additive noise; the
/// noise-free shifted form keeps comparisons reproducible.
double quartic(std::span<const double> x);

/// Ackley on [-32, 32]^D, minimum 0 at 0.
double ackley(std::span<const double> x);

/// Moving-center schedule for the dynamic sphere: the center is re-drawn
/// uniformly in the box every `change_period` evaluations, deterministically
/// from the seed. change_period = 0 means never (static schedule).
struct DynamicEnv {
    SearchSpace box;
    std::uint64_t change_period = 1000;
    std::uint64_t seed = 0;

    std::vector<double> center(std::uint64_t eval_index) const;
};

double dynamic_sphere(std::span<const double> x, std::uint64_t eval_index,
                      const DynamicEnv& env);

struct BenchmarkSpec {
    std::string name;
    std::size_t dim = 0;
    SearchSpace space;
    Objective objective;
    double known_optimum_value = 0.0;
    std::optional<std::vector<double>> known_optimizer;
};

/// Instantiates a named benchmark ("weierstrass"/"f9", "quartic"/"f10",
/// "ackley"/"f11", "dynamic-sphere"/"f12", "sphere") at the given dimension.
BenchmarkSpec make_benchmark(const std::string& name, std::size_t dim);

std::vector<std::string> benchmark_names();

} // namespace swarmstat::bench
