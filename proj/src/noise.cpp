#include "rflow/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "rflow/rng.hpp"

namespace rflow {

std::vector<double> NoisePath::cumulative(int coord) const {
    std::vector<double> w(grid.n_nodes());
    w[0] = 0.0;
    for (std::size_t k = 0; k < grid.n_steps; ++k) w[k + 1] = w[k] + increment(k, coord);
    return w;
}

NoisePath sample_noise(const TimeGrid& grid, int dim, std::uint64_t seed, std::uint64_t stream) {
    if (dim < 1) throw std::invalid_argument("sample_noise: dim must be >= 1");
    NoisePath noise{grid, dim, seed, stream, {}};
    noise.increments.resize(grid.n_steps * static_cast<std::size_t>(dim));
    const double sq = std::sqrt(grid.dt());
    for (std::size_t k = 0; k < grid.n_steps; ++k)
        for (int i = 0; i < dim; ++i)
            noise.increments[k * static_cast<std::size_t>(dim) + static_cast<std::size_t>(i)] =
                sq * gaussian_at(seed, stream, k, static_cast<std::uint32_t>(i));
    return noise;
}

} // namespace rflow
