#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace swarmstat {

/// Invalid optimizer or experiment configuration (odd swarm size, bad budget, ...).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid inputs to a statistical objective (constraint violation, bad matrix, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// An objective returned a non-finite value; carries the offending position.
class EvalError : public std::runtime_error {
public:
    EvalError(const std::string& what, std::vector<double> position)
        : std::runtime_error(what), position_(std::move(position)) {}

    const std::vector<double>& position() const { return position_; }

private:
    std::vector<double> position_;
};

} // namespace swarmstat
