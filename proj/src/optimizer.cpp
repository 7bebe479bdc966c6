#include "swarmstat/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "swarmstat/errors.hpp"

namespace swarmstat {

namespace {

std::string format_position(const std::vector<double>& x) {
    std::ostringstream os;
    os << "(";
    for (std::size_t q = 0; q < x.size(); ++q) {
        if (q) os << ", ";
        os << x[q];
        if (q >= 7 && x.size() > 9) {
            os << ", ...";
            break;
        }
    }
    os << ")";
    return os.str();
}

// Shared driver: budget loop, improvement-window stop, trace assembly.
template <typename Engine>
OptResult drive(Engine& engine, const OptConfig& config) {
    OptResult result;
    result.seed = config.seed;
    const auto t0 = std::chrono::steady_clock::now();

    if (config.record_trace)
        result.trace.emplace_back(engine.eval_count(), engine.incumbent_value());

    std::vector<double> window_marks; // incumbent at each iteration end
    while (engine.budget_allows_step()) {
        engine.step();
        if (config.record_trace)
            result.trace.emplace_back(engine.eval_count(), engine.incumbent_value());
        window_marks.push_back(engine.incumbent_value());
        if (config.tolerance > 0.0 &&
            window_marks.size() > static_cast<std::size_t>(config.window)) {
            const double before =
                window_marks[window_marks.size() - 1 - static_cast<std::size_t>(config.window)];
            if (before - window_marks.back() < config.tolerance) break;
        }
    }

    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.best_position = engine.incumbent_position();
    result.best_value = engine.incumbent_value();
    result.evals_used = engine.eval_count();
    return result;
}

} // namespace

std::string to_string(Algorithm a) {
    switch (a) {
    case Algorithm::cso_ma: return "cso-ma";
    case Algorithm::cso: return "cso";
    case Algorithm::pso: return "pso";
    }
    return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "cso-ma" || s == "cso_ma" || s == "csoma") return Algorithm::cso_ma;
    if (s == "cso") return Algorithm::cso;
    if (s == "pso") return Algorithm::pso;
    throw ConfigError("unknown algorithm: " + s);
}

void cso_loser_update(Particle& loser, const Particle& winner,
                      const std::vector<double>& center, double phi,
                      const SearchSpace& space, std::span<const double> r1,
                      std::span<const double> r2, std::span<const double> r3) {
    for (std::size_t q = 0; q < loser.position.size(); ++q) {
        loser.velocity[q] = r1[q] * loser.velocity[q] +
                            r2[q] * (winner.position[q] - loser.position[q]) +
                            phi * r3[q] * (center[q] - loser.position[q]);
        loser.position[q] += loser.velocity[q];
        if (loser.position[q] < space.lower[q]) {
            loser.position[q] = space.lower[q];
            loser.velocity[q] = 0.0;
        } else if (loser.position[q] > space.upper[q]) {
            loser.position[q] = space.upper[q];
            loser.velocity[q] = 0.0;
        }
    }
}

// ---------------------------------------------------------------- CsoEngine

CsoEngine::CsoEngine(Objective objective, SearchSpace space, OptConfig config)
    : objective_(std::move(objective)),
      space_(std::move(space)),
      config_(config),
      rng_(config.seed),
      mutate_(config.algorithm == Algorithm::cso_ma) {
    space_.validate();
    if (config_.swarm_size < 4 || config_.swarm_size % 2 != 0)
        throw ConfigError("CSO swarm size must be even and >= 4, got " +
                          std::to_string(config_.swarm_size));
    if (config_.max_evals < static_cast<std::uint64_t>(config_.swarm_size))
        throw ConfigError("evaluation budget smaller than one initialization sweep");

    const std::size_t n = static_cast<std::size_t>(config_.swarm_size);
    const std::size_t d = space_.dim();
    particles_.resize(n);
    best_value_ = std::numeric_limits<double>::infinity();
    for (auto& p : particles_) {
        p.position.resize(d);
        p.velocity.resize(d);
        for (std::size_t q = 0; q < d; ++q)
            p.position[q] = rng_.uniform(space_.lower[q], space_.upper[q]);
        for (std::size_t q = 0; q < d; ++q) {
            const double w = space_.upper[q] - space_.lower[q];
            p.velocity[q] = rng_.uniform(-w, w);
        }
    }
    for (auto& p : particles_) p.fitness = evaluate(p.position);
    compute_center();
}

double CsoEngine::evaluate(const std::vector<double>& internal_pos) {
    const std::vector<double> x = space_.repaired(internal_pos);
    const double v = objective_(x, eval_count_);
    ++eval_count_;
    if (!std::isfinite(v))
        throw EvalError("objective returned non-finite value at " + format_position(x), x);
    if (v < best_value_) {
        best_value_ = v;
        best_position_ = x;
    }
    return v;
}

void CsoEngine::refresh_all_fitness() {
    for (auto& p : particles_) p.fitness = evaluate(p.position);
}

void CsoEngine::compute_center() {
    const std::size_t d = space_.dim();
    center_.assign(d, 0.0);
    for (const auto& p : particles_)
        for (std::size_t q = 0; q < d; ++q) center_[q] += p.position[q];
    for (std::size_t q = 0; q < d; ++q) center_[q] /= static_cast<double>(particles_.size());
}

std::uint64_t CsoEngine::evals_per_iteration() const {
    const std::uint64_t n = particles_.size();
    std::uint64_t evals = n / 2 + (mutate_ ? 1 : 0);
    if (!objective_.is_pure()) evals += n; // cached fitness is stale, refresh everyone
    return evals;
}

bool CsoEngine::budget_allows_step() const {
    return eval_count_ + evals_per_iteration() <= config_.max_evals;
}

StepInfo CsoEngine::step() {
    const std::size_t n = particles_.size();
    const std::size_t d = space_.dim();
    StepInfo info;
    info.evals_before = eval_count_;

    if (!objective_.is_pure()) refresh_all_fitness();
    compute_center();

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng_.shuffle(order);

    std::vector<double> r1(d), r2(d), r3(d);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const int a = order[2 * k];
        const int b = order[2 * k + 1];
        // ties break toward the first of the pair
        const int winner = (particles_[static_cast<std::size_t>(b)].fitness <
                            particles_[static_cast<std::size_t>(a)].fitness)
                               ? b
                               : a;
        const int loser = (winner == a) ? b : a;
        info.winners.push_back(winner);
        info.losers.push_back(loser);

        auto& lp = particles_[static_cast<std::size_t>(loser)];
        const auto& wp = particles_[static_cast<std::size_t>(winner)];
        for (std::size_t q = 0; q < d; ++q) r1[q] = rng_.uniform();
        for (std::size_t q = 0; q < d; ++q) r2[q] = rng_.uniform();
        for (std::size_t q = 0; q < d; ++q) r3[q] = rng_.uniform();
        cso_loser_update(lp, wp, center_, config_.phi, space_, r1, r2, r3);
        lp.fitness = evaluate(lp.position);
    }

    if (mutate_) {
        const int p = info.losers[static_cast<std::size_t>(rng_.below(info.losers.size()))];
        const std::size_t q = static_cast<std::size_t>(rng_.below(d));
        const double side = rng_.uniform();
        auto& agent = particles_[static_cast<std::size_t>(p)];
        agent.position[q] = (side < 0.5) ? space_.lower[q] : space_.upper[q];
        agent.fitness = evaluate(agent.position);
        info.mutated = p;
        info.mutated_coord = static_cast<int>(q);
    }

    ++iterations_;
    info.evals_after = eval_count_;
    return info;
}

std::vector<double> CsoEngine::position(int i) const {
    return space_.repaired(particles_[static_cast<std::size_t>(i)].position);
}

OptResult CsoEngine::run() {
    OptResult r = drive(*this, config_);
    r.iterations = iterations_;
    return r;
}

// ---------------------------------------------------------------- PsoEngine

namespace {
constexpr double kPsoInertia = 0.729;
constexpr double kPsoCognitive = 1.49445;
constexpr double kPsoSocial = 1.49445;
} // namespace

PsoEngine::PsoEngine(Objective objective, SearchSpace space, OptConfig config)
    : objective_(std::move(objective)),
      space_(std::move(space)),
      config_(config),
      rng_(config.seed) {
    space_.validate();
    if (config_.swarm_size < 2)
        throw ConfigError("PSO swarm size must be >= 2, got " +
                          std::to_string(config_.swarm_size));
    if (config_.max_evals < static_cast<std::uint64_t>(config_.swarm_size))
        throw ConfigError("evaluation budget smaller than one initialization sweep");

    const std::size_t n = static_cast<std::size_t>(config_.swarm_size);
    const std::size_t d = space_.dim();
    particles_.resize(n);
    best_value_ = std::numeric_limits<double>::infinity();
    for (auto& p : particles_) {
        p.position.resize(d);
        p.velocity.resize(d);
        for (std::size_t q = 0; q < d; ++q)
            p.position[q] = rng_.uniform(space_.lower[q], space_.upper[q]);
        for (std::size_t q = 0; q < d; ++q) {
            const double w = space_.upper[q] - space_.lower[q];
            p.velocity[q] = rng_.uniform(-w, w);
        }
    }
    pbest_.resize(n);
    pbest_value_.assign(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        particles_[i].fitness = evaluate(particles_[i].position);
        pbest_[i] = particles_[i].position;
        pbest_value_[i] = particles_[i].fitness;
    }
    const std::size_t gi = static_cast<std::size_t>(
        std::min_element(pbest_value_.begin(), pbest_value_.end()) - pbest_value_.begin());
    gbest_ = pbest_[gi];
    gbest_value_ = pbest_value_[gi];
}

double PsoEngine::evaluate(const std::vector<double>& internal_pos) {
    const std::vector<double> x = space_.repaired(internal_pos);
    const double v = objective_(x, eval_count_);
    ++eval_count_;
    if (!std::isfinite(v))
        throw EvalError("objective returned non-finite value at " + format_position(x), x);
    if (v < best_value_) {
        best_value_ = v;
        best_position_ = x;
    }
    return v;
}

bool PsoEngine::budget_allows_step() const {
    return eval_count_ + particles_.size() <= config_.max_evals;
}

void PsoEngine::step() {
    const std::size_t d = space_.dim();
    // synchronous update: every particle sees the same gbest within one iteration
    const std::vector<double> gbest = gbest_;
    for (std::size_t i = 0; i < particles_.size(); ++i) {
        auto& p = particles_[i];
        for (std::size_t q = 0; q < d; ++q) {
            const double r1 = rng_.uniform();
            const double r2 = rng_.uniform();
            p.velocity[q] = kPsoInertia * p.velocity[q] +
                            kPsoCognitive * r1 * (pbest_[i][q] - p.position[q]) +
                            kPsoSocial * r2 * (gbest[q] - p.position[q]);
            p.position[q] += p.velocity[q];
            if (p.position[q] < space_.lower[q]) {
                p.position[q] = space_.lower[q];
                p.velocity[q] = 0.0;
            } else if (p.position[q] > space_.upper[q]) {
                p.position[q] = space_.upper[q];
                p.velocity[q] = 0.0;
            }
        }
        p.fitness = evaluate(p.position);
        if (p.fitness < pbest_value_[i]) {
            pbest_value_[i] = p.fitness;
            pbest_[i] = p.position;
        }
    }
    for (std::size_t i = 0; i < particles_.size(); ++i) {
        if (pbest_value_[i] < gbest_value_) {
            gbest_value_ = pbest_value_[i];
            gbest_ = pbest_[i];
        }
    }
    ++iterations_;
}

OptResult PsoEngine::run() {
    OptResult r = drive(*this, config_);
    r.iterations = iterations_;
    return r;
}

// ------------------------------------------------------------------ drivers

OptResult minimize(const Objective& objective, const SearchSpace& space,
                   const OptConfig& config) {
    if (config.algorithm == Algorithm::pso) {
        PsoEngine engine(objective, space, config);
        return engine.run();
    }
    CsoEngine engine(objective, space, config);
    return engine.run();
}

OptResult pso_minimize(const Objective& objective, const SearchSpace& space,
                       OptConfig config) {
    config.algorithm = Algorithm::pso;
    return minimize(objective, space, config);
}

std::vector<bool> boundary_flags(const std::vector<double>& position,
                                 const SearchSpace& space, double frac) {
    std::vector<bool> flags(position.size(), false);
    for (std::size_t q = 0; q < position.size(); ++q) {
        const double margin = frac * (space.upper[q] - space.lower[q]);
        flags[q] = (position[q] - space.lower[q] < margin) ||
                   (space.upper[q] - position[q] < margin);
    }
    return flags;
}

} // namespace swarmstat
