#include <cmath>

#include "doctest.h"
#include "rflow/derivative.hpp"
#include "rflow/rng.hpp"

using namespace rflow;

namespace {

Matrix rand_mat(Eigen::Index d, std::uint64_t seed) {
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            m(i, j) = 2.0 * uniform_at(seed, 2, static_cast<std::uint64_t>(i),
                                       static_cast<std::uint32_t>(j)) -
                      1.0;
    return m;
}

std::vector<double> beta_with_zero_nodes(const TimeGrid& grid,
                                         const std::vector<std::size_t>& zeros) {
    std::vector<double> beta(grid.n_nodes(), 1.0);
    for (std::size_t z : zeros) beta[z] = 0.0;
    return beta;
}

} // namespace

TEST_CASE("pi map without boundary visits is the identity") {
    const TimeGrid grid(1.0, 50);
    std::vector<Matrix> x(grid.n_nodes());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = rand_mat(3, 900 + k);
    const auto dec = decompose(grid, std::vector<double>(grid.n_nodes(), 1.0));
    const auto out = pi_map(x, dec);
    for (std::size_t k = 0; k < x.size(); ++k) CHECK((out[k] - x[k]).norm() == 0.0);
}

TEST_CASE("pi map of the constant identity path collapses to P after the hit") {
    const TimeGrid grid(1.0, 100);
    const auto dec = decompose(grid, beta_with_zero_nodes(grid, {40}));
    std::vector<Matrix> x(grid.n_nodes(), Matrix::Identity(2, 2));
    const auto out = pi_map(x, dec);
    const Matrix p = proj_tangential(2);
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (k < 40)
            CHECK((out[k] - Matrix::Identity(2, 2)).norm() == 0.0);
        else
            CHECK((out[k] - p).norm() == 0.0);
    }
}

TEST_CASE("pi map hand evaluation with zeros at 1 and 2") {
    const TimeGrid grid(3.0, 3000);
    const auto dec = decompose(grid, beta_with_zero_nodes(grid, {1000, 2000}));
    std::vector<Matrix> x(grid.n_nodes());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = grid.time(k) * Matrix::Identity(2, 2);
    const auto out = pi_map(x, dec);
    const Matrix expected =
        2.5 * proj_tangential(2) + 0.5 * proj_normal(2); // P*2.5 + Q*(2.5 - 2.0)
    CHECK(operator_norm(out[2500] - expected) < 1e-12);
}

TEST_CASE("picard with zero generator: identity before the hit, P afterwards") {
    const TimeGrid grid(1.0, 200);
    const auto dec = decompose(grid, beta_with_zero_nodes(grid, {77}));
    const AlphaPath alpha = AlphaPath::constant(grid, Matrix::Zero(2, 2));
    const auto sol = solve_picard(alpha, dec);
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        const Matrix expected = k < 77 ? Matrix::Identity(2, 2) : proj_tangential(2);
        CHECK((sol.gamma[k] - expected).norm() == 0.0);
    }
    CHECK(sol.residual <= 10.0 * 1e-8);
}

TEST_CASE("picard without boundary visits reproduces the propagator") {
    const TimeGrid grid(1.0, 2000);
    const Eigen::Index d = 3;
    std::vector<Matrix> values(grid.n_nodes());
    const Matrix a0 = rand_mat(d, 1001);
    const Matrix a1 = rand_mat(d, 1002);
    for (std::size_t k = 0; k < values.size(); ++k)
        values[k] = 0.4 * (a0 + std::sin(2.0 * grid.time(k)) * a1);
    const AlphaPath alpha(grid, values);
    const auto dec = decompose(grid, std::vector<double>(grid.n_nodes(), 1.0));
    const auto sol = solve_picard(alpha, dec);
    for (double t : {0.25, 0.5, 1.0}) {
        const Matrix prop = solve_propagator(alpha, 0.0, t).matrix;
        CHECK(operator_norm(sol.gamma[grid.index(t)] - prop) < 5e-6);
    }
}

TEST_CASE("product with two isolated zeros equals the chained projected exponentials") {
    const TimeGrid grid(1.0, 5000);
    const std::size_t z0 = 1500, z1 = 3500; // sigma0 = 0.3, sigma1 = 0.7
    const auto dec = decompose(grid, beta_with_zero_nodes(grid, {z0, z1}));
    const Matrix a = 0.8 * rand_mat(3, 1100);
    const AlphaPath alpha = AlphaPath::constant(grid, a);
    const Matrix p = proj_tangential(3);

    const auto prod = product_formula(alpha, dec, 1.0, grid.dt());
    const Matrix chained = mat_exp(a, 0.3) * p * mat_exp(a, 0.4) * p * mat_exp(a, 0.3);
    CHECK(operator_norm(prod.gamma - chained) < 1e-9);
    CHECK(prod.factors_used == 1);
    CHECK(prod.factors_dropped == 0);
    CHECK(prod.tail_bound == 0.0);

    const auto pic = solve_picard(alpha, dec);
    CHECK(operator_norm(pic.gamma.back() - prod.gamma) < 1e-6);
}

TEST_CASE("product with no completed arch between hit and horizon") {
    const TimeGrid grid(1.0, 2000);
    const std::size_t z0 = 1000;
    const auto dec = decompose(grid, beta_with_zero_nodes(grid, {z0}));
    const Matrix a = 0.6 * rand_mat(2, 1200);
    const AlphaPath alpha = AlphaPath::constant(grid, a);
    const auto prod = product_formula(alpha, dec, 1.0, grid.dt());
    const Matrix chained = mat_exp(a, 0.5) * proj_tangential(2) * mat_exp(a, 0.5);
    CHECK(operator_norm(prod.gamma - chained) < 1e-9);
    CHECK(prod.factors_used == 0);
}

TEST_CASE("product before the first hit is the plain propagator") {
    const TimeGrid grid(1.0, 2000);
    const auto dec = decompose(grid, beta_with_zero_nodes(grid, {1500}));
    const Matrix a = 0.6 * rand_mat(2, 1300);
    const AlphaPath alpha = AlphaPath::constant(grid, a);
    const auto at = product_formula(alpha, dec, 0.5, grid.dt());
    CHECK(operator_norm(at.gamma - mat_exp(a, 0.5)) < 1e-9);
}

TEST_CASE("planar product with a boundary stretch: independent scalar evaluation") {
    // zero set = [0.5, 0.7] as a run of nodes plus an isolated zero at 0.9
    const TimeGrid grid(1.0, 10000);
    std::vector<double> beta(grid.n_nodes(), 1.0);
    for (std::size_t k = 5000; k <= 7000; ++k) beta[k] = 0.0;
    beta[9000] = 0.0;
    const auto dec = decompose(grid, beta);

    Matrix a(2, 2);
    a << 1.0, 1.0, 1.0, 1.0;
    const AlphaPath alpha = AlphaPath::constant(grid, a);
    const auto prod = product_formula(alpha, dec, 1.0, grid.dt());

    // scalar route: one factor (e^{2 gap} + 1)/2 per inter-zero gap, one for
    // the lead-in, one for the tail since the last zero
    auto u = [](double len) { return 0.5 * (std::exp(2.0 * len) + 1.0); };
    double expected = u(grid.time(5000));
    for (std::size_t k = 5001; k <= 7000; ++k) expected *= u(grid.dt());
    expected *= u(grid.time(9000) - grid.time(7000));
    expected *= u(1.0 - grid.time(9000));
    CHECK(std::abs(prod.gamma(0, 0) - expected) < 1e-9 * expected);

    // isolated-zero variant: zeros exactly at 0.5, 0.7, 0.9
    const auto dec_iso = decompose(grid, beta_with_zero_nodes(grid, {5000, 7000, 9000}));
    const auto prod_iso = product_formula(alpha, dec_iso, 1.0, grid.dt());
    const double expected_iso = u(0.5) * u(0.2) * u(0.2) * u(0.1);
    CHECK(std::abs(prod_iso.gamma(0, 0) - expected_iso) < 1e-9 * expected_iso);
}

TEST_CASE("tail bound formula and hand-checked geometric case") {
    CHECK(product_tail_bound({}, 3.0) == 0.0);
    std::vector<double> all(30), dropped;
    double total = 0.0;
    for (std::size_t j = 1; j <= 30; ++j) {
        all[j - 1] = std::pow(2.0, -static_cast<double>(j));
        total += all[j - 1];
        if (j > 10) dropped.push_back(all[j - 1]);
    }
    double dropped_sum = 0.0;
    for (double v : dropped) dropped_sum += v;
    const double bound = product_tail_bound(dropped, total);
    CHECK(bound == doctest::Approx(dropped_sum * std::exp(total)).epsilon(1e-15));
    CHECK(bound < std::pow(2.0, -10.0) * std::exp(1.0) * 1.001);
    CHECK_THROWS_AS(product_tail_bound({{-1.0}}, 1.0), std::invalid_argument);
}

TEST_CASE("truncation never strays further than the reported bound") {
    const TimeGrid grid(1.0, 10000);
    const DriftSpec drift = DriftSpec::example2d();
    const NoisePath noise = sample_noise(grid, 2, 1400);
    Vector x(2);
    x << 0.05, 0.05;
    const ReflectedPath path = solve_rsde(x, drift, noise);
    const auto dec = decompose(grid, path.boundary_coordinate());
    REQUIRE(dec.hits_boundary());
    const AlphaPath alpha = AlphaPath::constant(grid, drift.a_linear);
    const auto full = product_formula(alpha, dec, 1.0, grid.dt());
    double last_bound = 0.0;
    for (double cutoff : {5.0, 20.0, 100.0, 400.0}) {
        const auto trunc = product_formula(alpha, dec, 1.0, cutoff * grid.dt());
        CHECK(operator_norm(trunc.gamma - full.gamma) <= trunc.tail_bound + 1e-12);
        CHECK(trunc.tail_bound >= last_bound); // more dropped, larger bound
        last_bound = trunc.tail_bound;
    }
}

TEST_CASE("P-sandwich is idempotent") {
    const Matrix m = rand_mat(4, 1500);
    const Matrix p = proj_tangential(4);
    const Matrix once = p * m * p;
    CHECK((p * once * p - once).norm() == 0.0);
}

TEST_CASE("derivative of a flow that never reflects is the propagator") {
    const TimeGrid grid(0.5, 5000);
    const DriftSpec drift = DriftSpec::example2d();
    const NoisePath noise = sample_noise(grid, 2, 1600);
    Vector x(2);
    x << 0.1, 50.0;
    const ReflectedPath path = solve_rsde(x, drift, noise);
    const auto pic = derivative_for_flow(path, drift, DerivativeSolution::Method::picard);
    const auto prod = derivative_for_flow(path, drift, DerivativeSolution::Method::product);
    const Matrix expected = mat_exp(drift.a_linear, 0.5);
    CHECK(operator_norm(pic.gamma.back() - expected) < 1e-5);
    CHECK(operator_norm(prod.gamma.back() - expected) < 1e-9);
    double disagreement = 0.0;
    for (std::size_t k = 0; k < grid.n_nodes(); ++k)
        disagreement = std::max(disagreement, operator_norm(pic.gamma[k] - prod.gamma[k]));
    CHECK(disagreement < 1e-5);
}

TEST_CASE("both solvers satisfy the integral-system residuals") {
    const TimeGrid grid(1.0, 10000);
    const DriftSpec drift = DriftSpec::example2d();
    const NoisePath noise = sample_noise(grid, 2, 1700);
    Vector x(2);
    x << 0.1, 0.05;
    const ReflectedPath path = solve_rsde(x, drift, noise);
    const auto dec = decompose(grid, path.boundary_coordinate());
    REQUIRE(dec.hits_boundary());
    const AlphaPath alpha = AlphaPath::constant(grid, drift.a_linear);

    const PicardOptions opts{1e-8, 200};
    const auto pic = solve_picard(alpha, dec, opts);
    const auto rep_pic = residual_report(pic.gamma, alpha, dec);
    CHECK(rep_pic.max() <= 10.0 * opts.tol);

    const auto prod = solve_product(alpha, dec, grid.dt());
    const auto rep_prod = residual_report(prod.gamma, alpha, dec);
    // quadrature-limited rather than tolerance-limited
    CHECK(rep_prod.max() <= 1e-4);
}

TEST_CASE("picard reports non-convergence with the residual attached") {
    const TimeGrid grid(1.0, 500);
    const auto dec = decompose(grid, beta_with_zero_nodes(grid, {250}));
    const AlphaPath alpha = AlphaPath::constant(grid, 2.0 * Matrix::Identity(2, 2));
    CHECK_THROWS_AS(solve_picard(alpha, dec, PicardOptions{1e-12, 2}), PicardConvergenceError);
    try {
        solve_picard(alpha, dec, PicardOptions{1e-12, 2});
    } catch (const PicardConvergenceError& e) {
        CHECK(e.last_delta > 0.0);
        CHECK(e.residual > 0.0);
    }
}

TEST_CASE("finite differences reproduce the one-dimensional case table") {
    const TimeGrid grid(1.0, 10000);
    const DriftSpec drift = DriftSpec::zero(1);
    const NoisePath noise = sample_noise(grid, 1, 1800);
    const auto w = noise.cumulative(0);
    const double min_w = *std::min_element(w.begin(), w.end());
    const double h = 1e-3;
    Vector x(1);
    x << -min_w + 0.05;
    CHECK(std::abs(finite_difference(x, h, 0, drift, noise, 1.0)(0) - 1.0) < 1e-10);
    if (-min_w - 0.05 - h > 0.0) {
        x << -min_w - 0.05;
        CHECK(std::abs(finite_difference(x, h, 0, drift, noise, 1.0)(0)) < 1e-10);
    }
    CHECK_THROWS_AS(finite_difference(x, -1.0, 0, drift, noise, 1.0), std::invalid_argument);
}

TEST_CASE("finite differences agree with the solved derivative away from the critical set") {
    const TimeGrid grid(1.0, 10000);
    const DriftSpec drift = DriftSpec::example2d();
    const double h = 1e-3;
    std::size_t tested = 0;
    for (std::uint64_t seed = 1900; seed < 1912; ++seed) {
        const NoisePath noise = sample_noise(grid, 2, seed);
        Vector x(2);
        x << 0.3, 0.2;
        const ReflectedPath path = solve_rsde(x, drift, noise);

        Vector xp = x, xm = x;
        xp(0) += h;
        xm(0) -= h;
        const auto dp = decompose(grid, solve_rsde(xp, drift, noise).boundary_coordinate());
        const auto dm = decompose(grid, solve_rsde(xm, drift, noise).boundary_coordinate());
        if (decompositions_materially_differ(dp, dm, 10)) continue; // near the critical set

        const auto sol = derivative_for_flow(path, drift, DerivativeSolution::Method::product);
        const Vector fd = finite_difference(x, h, 0, drift, noise, 1.0);
        CHECK(std::abs(fd(0) - sol.gamma.back()(0, 0)) < 1e-2);
        ++tested;
    }
    CHECK(tested >= 1);
}

TEST_CASE("pi map is non-expansive up to the factor two") {
    const TimeGrid grid(1.0, 300);
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
        std::vector<double> beta(grid.n_nodes(), 1.0);
        for (std::size_t k = 0; k < beta.size(); ++k)
            if (uniform_at(2000 + rep, 3, k, 0) < 0.15) beta[k] = 0.0;
        const auto dec = decompose(grid, beta);
        std::vector<Matrix> x1(grid.n_nodes()), x2(grid.n_nodes());
        for (std::size_t k = 0; k < x1.size(); ++k) {
            x1[k] = rand_mat(2, 2100 + rep * 1000 + k);
            x2[k] = rand_mat(2, 2600 + rep * 1000 + k);
        }
        const auto p1 = pi_map(x1, dec);
        const auto p2 = pi_map(x2, dec);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < x1.size(); ++k) {
            num = std::max(num, operator_norm(p1[k] - p2[k]));
            den = std::max(den, operator_norm(x1[k] - x2[k]));
        }
        CHECK(num <= 2.0 * den + 1e-12);
    }
}
