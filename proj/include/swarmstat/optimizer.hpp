#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "swarmstat/objective.hpp"
#include "swarmstat/random.hpp"
#include "swarmstat/search_space.hpp"

namespace swarmstat {

enum class Algorithm { cso_ma, cso, pso };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct OptConfig {
    int swarm_size = 40;         // n; CSO pairing needs it even and >= 4
    double phi = 0.3;            // social factor pulling losers toward the swarm center
    std::uint64_t max_evals = 10000;
    double tolerance = 1e-5;     // improvement threshold; 0 disables the window rule
    int window = 20;             // iterations per improvement window
    std::uint64_t seed = 0;
    Algorithm algorithm = Algorithm::cso_ma;
    bool record_trace = true;
};

struct OptResult {
    std::vector<double> best_position;
    double best_value = 0.0;
    std::uint64_t evals_used = 0;
    std::vector<std::pair<std::uint64_t, double>> trace; // (eval_count, incumbent)
    std::uint64_t seed = 0;
    double elapsed_seconds = 0.0; // the only field exempt from the determinism contract
    std::uint64_t iterations = 0;
};

struct Particle {
    std::vector<double> position; // continuous internal representation
    std::vector<double> velocity;
    double fitness = 0.0;
};

/// What one engine iteration did; consumed by the property-test suites.
struct StepInfo {
    std::vector<int> winners;
    std::vector<int> losers;
    int mutated = -1;       // particle index, or -1 when no mutation ran
    int mutated_coord = -1; // coordinate teleported to a bound
    std::uint64_t evals_before = 0;
    std::uint64_t evals_after = 0;
};

/// One loser update: velocity re-mixed toward the winner and the swarm center
/// with elementwise multipliers r1, r2, r3, position stepped by the velocity,
/// then boundary repair (clamp, zero the violated velocity component).
void cso_loser_update(Particle& loser, const Particle& winner,
                      const std::vector<double>& center, double phi,
                      const SearchSpace& space, std::span<const double> r1,
                      std::span<const double> r2, std::span<const double> r3);

/// Competitive swarm optimizer, with or without the mutated-agent step.
///
/// Deterministic RNG protocol per run, in draw order:
///   init:      per particle, position coordinates then velocity coordinates;
///              positions uniform in the box, velocities uniform in
///              +-(upper - lower).
///   iteration: Fisher-Yates shuffle of particle indices (pairs are taken as
///              consecutive entries of the shuffled order); then per pair, the
///              loser draws vectors R1, R2, R3 coordinate by coordinate and is
///              updated and evaluated immediately; finally, when mutation is
///              enabled: loser-index draw, coordinate draw, bound-side draw.
/// Identical (seed, config, objective) therefore reproduce bit-identical runs.
///
/// Boundary repair clamps a position coordinate to the violated bound and
/// zeroes that velocity component. Mixed-kind coordinates stay continuous
/// internally and are snapped (round / sign) in every externally observable
/// position, including the ones handed to the objective.
class CsoEngine {
public:
    CsoEngine(Objective objective, SearchSpace space, OptConfig config);

    /// Runs one pair-update (+ mutation) iteration. Call after construction;
    /// the initialization sweep has already been charged to the budget.
    StepInfo step();

    bool budget_allows_step() const;

    /// Full run: iterates until the eval budget or the improvement window rule stops it.
    OptResult run();

    // Observable state (positions kind-repaired).
    std::size_t size() const { return particles_.size(); }
    std::vector<double> position(int i) const;
    double fitness(int i) const { return particles_[static_cast<std::size_t>(i)].fitness; }
    const std::vector<double>& center() const { return center_; }
    std::uint64_t eval_count() const { return eval_count_; }
    double incumbent_value() const { return best_value_; }
    const std::vector<double>& incumbent_position() const { return best_position_; }
    std::uint64_t iterations_done() const { return iterations_; }

private:
    double evaluate(const std::vector<double>& internal_pos);
    void refresh_all_fitness();
    void compute_center();
    std::uint64_t evals_per_iteration() const;

    Objective objective_;
    SearchSpace space_;
    OptConfig config_;
    Rng rng_;
    std::vector<Particle> particles_;
    std::vector<double> center_;
    std::vector<double> best_position_;
    double best_value_ = 0.0;
    std::uint64_t eval_count_ = 0;
    std::uint64_t iterations_ = 0;
    bool mutate_;
};

/// Canonical global-best PSO with constriction constants (inertia 0.729,
/// cognitive = social = 1.49445). Same repair, stopping, and determinism
/// contracts as CsoEngine; the swarm size may be odd.
class PsoEngine {
public:
    PsoEngine(Objective objective, SearchSpace space, OptConfig config);

    void step();
    bool budget_allows_step() const;
    OptResult run();

    std::uint64_t eval_count() const { return eval_count_; }
    double incumbent_value() const { return best_value_; }
    const std::vector<double>& incumbent_position() const { return best_position_; }

private:
    double evaluate(const std::vector<double>& internal_pos);

    Objective objective_;
    SearchSpace space_;
    OptConfig config_;
    Rng rng_;
    std::vector<Particle> particles_;
    std::vector<std::vector<double>> pbest_;
    std::vector<double> pbest_value_;
    std::vector<double> gbest_;
    double gbest_value_ = 0.0;
    std::vector<double> best_position_;
    double best_value_ = 0.0;
    std::uint64_t eval_count_ = 0;
    std::uint64_t iterations_ = 0;
};

/// Minimizes the objective over the box with the configured algorithm.
OptResult minimize(const Objective& objective, const SearchSpace& space,
                   const OptConfig& config);

/// Convenience wrapper forcing Algorithm::pso.
OptResult pso_minimize(const Objective& objective, const SearchSpace& space,
                       OptConfig config);

/// True per coordinate when the position sits within `frac` of the coordinate
/// range from a bound. Used by the fitting modules to flag boundary solutions.
std::vector<bool> boundary_flags(const std::vector<double>& position,
                                 const SearchSpace& space, double frac = 0.01);

} // namespace swarmstat
