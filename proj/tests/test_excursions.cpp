#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "rflow/excursions.hpp"
#include "rflow/io.hpp"
#include "rflow/sde.hpp"

using namespace rflow;

namespace {

std::vector<double> reflected_beta(const TimeGrid& grid, std::uint64_t seed, double x2 = 0.1) {
    const DriftSpec drift = DriftSpec::example2d();
    const NoisePath noise = sample_noise(grid, 2, seed);
    Vector x(2);
    x << 0.0, x2;
    return solve_rsde(x, drift, noise).boundary_coordinate();
}

} // namespace

TEST_CASE("a strictly positive path never decomposes") {
    const TimeGrid grid(1.0, 100);
    std::vector<double> beta(grid.n_nodes(), 0.3);
    const auto dec = decompose(grid, beta);
    CHECK(!dec.hits_boundary());
    CHECK(dec.sigma0() == std::numeric_limits<double>::infinity());
    CHECK(dec.excursions.empty());
    CHECK(dec.zero_set_measure == 0.0);
}

TEST_CASE("sine arch pattern splits into unit arches") {
    // |sin(pi t)| on [0, 3], sampled so the integer zeros land exactly on nodes
    const TimeGrid grid(3.0, 3000);
    std::vector<double> beta(grid.n_nodes());
    for (std::size_t k = 0; k < beta.size(); ++k)
        beta[k] = (k % 1000 == 0) ? 0.0 : std::abs(std::sin(3.14159265358979324 * grid.time(k)));
    const auto dec = decompose(grid, beta);
    CHECK(dec.hits_boundary());
    CHECK(dec.sigma0() == 0.0);
    REQUIRE(dec.excursions.size() == 3);
    CHECK(dec.excursions[0].begin == 0);
    CHECK(dec.excursions[0].end == 1000);
    CHECK(dec.excursions[1].begin == 1000);
    CHECK(dec.excursions[1].end == 2000);
    CHECK(dec.excursions[2].begin == 2000);
    CHECK(dec.excursions[2].end == 3000);
    for (const auto& e : dec.excursions) CHECK(e.closed);
}

TEST_CASE("negative input is rejected") {
    const TimeGrid grid(1.0, 4);
    std::vector<double> beta = {0.1, -0.1, 0.2, 0.3, 0.1};
    CHECK_THROWS_AS(decompose(grid, beta), std::invalid_argument);
}

TEST_CASE("reconstruction: positivity set equals the interval interiors exactly") {
    const TimeGrid grid(1.0, 10000);
    for (std::uint64_t seed : {501, 502, 503}) {
        const auto beta = reflected_beta(grid, seed);
        const auto dec = decompose(grid, beta);
        std::set<std::size_t> from_intervals;
        if (dec.hits_boundary()) {
            for (std::size_t k = 0; k < *dec.first_zero; ++k) from_intervals.insert(k);
            for (const auto& e : dec.excursions)
                for (std::size_t k = e.begin + 1; k < (e.closed ? e.end : grid.n_steps + 1); ++k)
                    from_intervals.insert(k);
        } else {
            for (std::size_t k = 0; k < grid.n_nodes(); ++k) from_intervals.insert(k);
        }
        std::set<std::size_t> positive;
        for (std::size_t k = 0; k < beta.size(); ++k)
            if (beta[k] > 0.0) positive.insert(k);
        CHECK(from_intervals == positive);
    }
}

TEST_CASE("zero-set measure shrinks under grid refinement") {
    double coarse = 0.0, mid = 0.0, fine = 0.0;
    const std::size_t n_seeds = 5;
    for (std::uint64_t seed = 600; seed < 600 + n_seeds; ++seed) {
        coarse += decompose(TimeGrid(1.0, 100), reflected_beta(TimeGrid(1.0, 100), seed))
                      .zero_set_measure;
        mid += decompose(TimeGrid(1.0, 1000), reflected_beta(TimeGrid(1.0, 1000), seed))
                   .zero_set_measure;
        fine += decompose(TimeGrid(1.0, 10000), reflected_beta(TimeGrid(1.0, 10000), seed))
                    .zero_set_measure;
    }
    CHECK(mid < 0.7 * coarse);
    CHECK(fine < 0.7 * mid);
}

TEST_CASE("last zero lookups") {
    const TimeGrid grid(1.0, 1000);
    std::vector<double> beta(grid.n_nodes(), 1.0);
    for (std::size_t z : {100u, 101u, 102u, 400u, 800u}) beta[z] = 0.0;
    const auto dec = decompose(grid, beta);

    CHECK(dec.last_zero_time(0.25) == grid.time(102)); // inside (102, 400)
    CHECK(dec.last_zero_time(0.4) == grid.time(400));  // a zero node itself
    CHECK_THROWS_AS(dec.last_zero_time(0.05), std::invalid_argument);

    // brute-force oracle at the horizon
    const auto beta2 = reflected_beta(grid, 611);
    const auto dec2 = decompose(grid, beta2);
    if (dec2.hits_boundary()) {
        std::size_t last = 0;
        for (std::size_t k = 0; k < beta2.size(); ++k)
            if (beta2[k] == 0.0) last = k;
        CHECK(dec2.last_zero_time(1.0) == grid.time(last));
    }
}

TEST_CASE("truncation bookkeeping") {
    const TimeGrid grid(1.0, 10000);
    const auto beta = reflected_beta(grid, 640);
    const auto dec = decompose(grid, beta);
    REQUIRE(dec.hits_boundary());
    REQUIRE(!dec.excursions.empty());

    SUBCASE("zero cutoff is the identity") {
        const auto res = truncate(dec, 0.0);
        CHECK(res.dropped_count == 0);
        CHECK(res.dropped_mass == 0.0);
        CHECK(res.decomposition.excursions.size() == dec.excursions.size());
    }
    SUBCASE("a cutoff beyond the horizon drops everything") {
        const auto res = truncate(dec, 2.0);
        CHECK(res.decomposition.excursions.empty());
        CHECK(res.dropped_count == dec.excursions.size());
        double total = 0.0;
        for (const auto& e : dec.excursions)
            total += grid.dt() * static_cast<double>(e.end - e.begin);
        CHECK(res.dropped_mass == doctest::Approx(total).epsilon(1e-12));
    }
    SUBCASE("dropped mass matches an independent recount") {
        const double cutoff = 10.0 * grid.dt();
        const auto res = truncate(dec, cutoff);
        double mass = 0.0;
        std::size_t count = 0;
        for (const auto& e : dec.excursions) {
            const double len = grid.dt() * static_cast<double>(e.end - e.begin);
            if (len < cutoff) {
                mass += len;
                ++count;
            }
        }
        CHECK(res.dropped_count == count);
        CHECK(res.dropped_mass == doctest::Approx(mass).epsilon(1e-12));
        // kept + dropped partitions the original family
        CHECK(res.decomposition.excursions.size() + count == dec.excursions.size());
    }
}

TEST_CASE("excursions of the lower start nest inside those of the higher start") {
    const TimeGrid grid(1.0, 10000);
    const DriftSpec drift = DriftSpec::example2d();
    for (std::uint64_t seed : {700, 701, 702}) {
        const NoisePath noise = sample_noise(grid, 2, seed);
        Vector xa(2), xb(2);
        xa << -0.3, 0.1;
        xb << 0.2, 0.1;
        const auto paths = solve_rsde_shared({xa, xb}, drift, noise);
        const auto low = decompose(grid, paths[0].boundary_coordinate());
        const auto high = decompose(grid, paths[1].boundary_coordinate());
        if (!low.hits_boundary()) continue;
        for (const auto& e : low.excursions) {
            bool contained = false;
            for (const auto& h : high.excursions) {
                const std::size_t h_end = h.closed ? h.end : grid.n_steps + 1;
                if (h.begin <= e.begin && (e.closed ? e.end : grid.n_steps) <= h_end) {
                    contained = true;
                    break;
                }
            }
            if (!high.hits_boundary()) contained = true; // the whole horizon is one arch
            CHECK(contained);
        }
    }
}

TEST_CASE("decomposition JSON carries the documented fields") {
    const TimeGrid grid(1.0, 1000);
    std::vector<double> beta(grid.n_nodes(), 1.0);
    beta[500] = 0.0;
    const auto j = decomposition_json(decompose(grid, beta));
    CHECK(j.contains("sigma0"));
    CHECK(j.contains("intervals"));
    CHECK(j.contains("zero_measure"));
    CHECK(j["sigma0"].get<double>() == doctest::Approx(0.5));
    CHECK(j["intervals"].size() == 1);
    CHECK(j["intervals"][0][1].is_null()); // open tail
}
