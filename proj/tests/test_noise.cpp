#include <cmath>

#include "doctest.h"
#include "rflow/noise.hpp"

using namespace rflow;

TEST_CASE("same seed reproduces the increments bit for bit") {
    const TimeGrid grid(1.0, 5000);
    const NoisePath a = sample_noise(grid, 2, 12345);
    const NoisePath b = sample_noise(grid, 2, 12345);
    CHECK(a.increments == b.increments);
}

TEST_CASE("different seeds and streams give different increments") {
    const TimeGrid grid(1.0, 100);
    const NoisePath a = sample_noise(grid, 1, 1);
    const NoisePath b = sample_noise(grid, 1, 2);
    const NoisePath c = sample_noise(grid, 1, 1, 1);
    CHECK(a.increments != b.increments);
    CHECK(a.increments != c.increments);
}

TEST_CASE("increment variance matches dt") {
    const TimeGrid grid(100.0, 100000); // dt = 1e-3
    const NoisePath noise = sample_noise(grid, 1, 99);
    double mean = 0.0;
    for (double v : noise.increments) mean += v;
    mean /= static_cast<double>(noise.increments.size());
    double var = 0.0;
    for (double v : noise.increments) var += (v - mean) * (v - mean);
    var /= static_cast<double>(noise.increments.size() - 1);
    CHECK(std::abs(var - 1e-3) < 0.05e-3);
    CHECK(std::abs(mean) < 5.0 * std::sqrt(1e-3 / 1e5));
}

TEST_CASE("cumulative path starts at zero") {
    const TimeGrid grid(1.0, 64);
    const NoisePath noise = sample_noise(grid, 3, 5);
    for (int c = 0; c < 3; ++c) {
        const auto w = noise.cumulative(c);
        CHECK(w.size() == grid.n_nodes());
        CHECK(w[0] == 0.0);
    }
}

TEST_CASE("dimension must be positive") {
    CHECK_THROWS_AS(sample_noise(TimeGrid(1.0, 10), 0, 1), std::invalid_argument);
}
