#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "swarmstat/errors.hpp"

namespace swarmstat {

enum class CoordKind { continuous, integer, binary };

/// Feasible box with per-coordinate kinds. Binary coordinates span exactly
/// [-1, +1]; integer coordinates have integral bounds.
struct SearchSpace {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<CoordKind> kind; // empty means all-continuous

    std::size_t dim() const { return lower.size(); }

    CoordKind kind_of(std::size_t q) const {
        return kind.empty() ? CoordKind::continuous : kind[q];
    }

    static SearchSpace box(std::size_t dim, double lo, double hi) {
        SearchSpace s;
        s.lower.assign(dim, lo);
        s.upper.assign(dim, hi);
        return s;
    }

    void validate() const {
        if (lower.size() != upper.size())
            throw ConfigError("search space: bound vectors differ in length");
        if (!kind.empty() && kind.size() != lower.size())
            throw ConfigError("search space: kind vector length mismatch");
        if (lower.empty())
            throw ConfigError("search space: zero dimensions");
        for (std::size_t q = 0; q < lower.size(); ++q) {
            if (!(lower[q] < upper[q]))
                throw ConfigError("search space: lower >= upper at coordinate " +
                                  std::to_string(q));
            if (!std::isfinite(lower[q]) || !std::isfinite(upper[q]))
                throw ConfigError("search space: non-finite bound at coordinate " +
                                  std::to_string(q));
            switch (kind_of(q)) {
            case CoordKind::binary:
                if (lower[q] != -1.0 || upper[q] != 1.0)
                    throw ConfigError("search space: binary coordinate " +
                                      std::to_string(q) + " must span [-1, 1]");
                break;
            case CoordKind::integer:
                if (lower[q] != std::floor(lower[q]) || upper[q] != std::floor(upper[q]))
                    throw ConfigError("search space: integer coordinate " +
                                      std::to_string(q) + " has non-integral bounds");
                break;
            case CoordKind::continuous:
                break;
            }
        }
    }

    double clamp(std::size_t q, double v) const {
        if (v < lower[q]) return lower[q];
        if (v > upper[q]) return upper[q];
        return v;
    }

    /// Kind repair of one in-box coordinate: integers round, binaries snap to
    /// sign (0 maps to +1), continuous pass through.
    double snap(std::size_t q, double v) const {
        switch (kind_of(q)) {
        case CoordKind::integer:
            return clamp(q, std::round(v));
        case CoordKind::binary:
            return v < 0.0 ? -1.0 : 1.0;
        case CoordKind::continuous:
        default:
            return v;
        }
    }

    bool all_continuous() const {
        for (std::size_t q = 0; q < dim(); ++q)
            if (kind_of(q) != CoordKind::continuous) return false;
        return true;
    }

    /// Observable view of an internal (continuous, box-clamped) position.
    std::vector<double> repaired(std::span<const double> x) const {
        std::vector<double> out(x.begin(), x.end());
        for (std::size_t q = 0; q < out.size(); ++q)
            out[q] = snap(q, clamp(q, out[q]));
        return out;
    }

    bool contains(std::span<const double> x) const {
        if (x.size() != dim()) return false;
        for (std::size_t q = 0; q < x.size(); ++q)
            if (x[q] < lower[q] || x[q] > upper[q]) return false;
        return true;
    }
};

} // namespace swarmstat
