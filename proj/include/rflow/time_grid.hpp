#pragma once

#include <cstddef>
#include <stdexcept>

namespace rflow {

/// Uniform partition of [0, T] into n_steps cells (n_steps + 1 nodes).
struct TimeGrid {
    double t_end = 1.0;
    std::size_t n_steps = 10000;

    TimeGrid() = default;
    TimeGrid(double T, std::size_t n) : t_end(T), n_steps(n) {
        if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: t_end must be positive");
        if (n == 0) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
    }

    double dt() const { return t_end / static_cast<double>(n_steps); }
    std::size_t n_nodes() const { return n_steps + 1; }

    /// Node time; time(0) == 0 and time(n_steps) == t_end exactly.
    double time(std::size_t k) const {
        return t_end * (static_cast<double>(k) / static_cast<double>(n_steps));
    }

    /// Nearest node index to a time in [0, T].
    std::size_t index(double t) const {
        if (!(t >= 0.0) || t > t_end * (1.0 + 1e-12))
            throw std::invalid_argument("TimeGrid::index: time outside [0, t_end]");
        double k = static_cast<double>(n_steps) * (t / t_end) + 0.5;
        auto idx = static_cast<std::size_t>(k);
        return idx > n_steps ? n_steps : idx;
    }

    bool operator==(const TimeGrid&) const = default;
};

} // namespace rflow
