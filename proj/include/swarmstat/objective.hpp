#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>

namespace swarmstat {

/// A scalar function over a search space. `pure` objectives depend only on x;
/// impure ones (dynamic benchmarks) also see the global evaluation index, and
/// the optimizers stop trusting cached fitness values for them.
class Objective {
public:
    using Fn = std::function<double(std::span<const double>)>;
    using DynamicFn = std::function<double(std::span<const double>, std::uint64_t)>;

    Objective() = default;

    static Objective pure(std::string name, Fn fn) {
        Objective o;
        o.name_ = std::move(name);
        o.fn_ = [f = std::move(fn)](std::span<const double> x, std::uint64_t) {
            return f(x);
        };
        o.pure_ = true;
        return o;
    }

    static Objective dynamic(std::string name, DynamicFn fn) {
        Objective o;
        o.name_ = std::move(name);
        o.fn_ = std::move(fn);
        o.pure_ = false;
        return o;
    }

    double operator()(std::span<const double> x, std::uint64_t eval_index = 0) const {
        return fn_(x, eval_index);
    }

    const std::string& name() const { return name_; }
    bool is_pure() const { return pure_; }
    std::optional<double> known_optimum() const { return known_optimum_; }
    Objective& with_known_optimum(double v) {
        known_optimum_ = v;
        return *this;
    }

private:
    std::string name_;
    DynamicFn fn_;
    bool pure_ = true;
    std::optional<double> known_optimum_;
};

} // namespace swarmstat
