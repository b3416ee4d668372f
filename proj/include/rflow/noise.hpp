#pragma once

#include <cstdint>
#include <vector>

#include "rflow/time_grid.hpp"

namespace rflow {

/// Brownian increments on a grid: increments[k*dim + i] has variance dt.
/// Fully determined by (seed, stream, grid, dim).
struct NoisePath {
    TimeGrid grid;
    int dim = 1;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<double> increments; // n_steps * dim

    double increment(std::size_t step, int coord) const {
        return increments[step * static_cast<std::size_t>(dim) + static_cast<std::size_t>(coord)];
    }

    /// Cumulative path of one coordinate: w_0 = 0, w_{k+1} = w_k + dw_k.
    std::vector<double> cumulative(int coord) const;
};

NoisePath sample_noise(const TimeGrid& grid, int dim, std::uint64_t seed, std::uint64_t stream = 0);

} // namespace rflow
