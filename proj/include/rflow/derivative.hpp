#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "rflow/excursions.hpp"
#include "rflow/matrix.hpp"
#include "rflow/sde.hpp"

namespace rflow {

/// Derivative-in-initial-data matrix path gamma(t_k), with metadata from the
/// method that produced it.
struct DerivativeSolution {
    enum class Method { picard, product };

    TimeGrid grid;
    std::vector<Matrix> gamma;
    Method method = Method::picard;

    // picard
    int iterations = 0;
    double last_delta = 0.0;
    double residual = 0.0;

    // product
    double truncation_min_length = 0.0;
    double tail_bound = 0.0;
    std::size_t factors_used = 0;
    std::size_t factors_dropped = 0;
};

class PicardConvergenceError : public std::runtime_error {
public:
    PicardConvergenceError(std::string msg, double delta, double res)
        : std::runtime_error(std::move(msg)), last_delta(delta), residual(res) {}
    double last_delta;
    double residual;
};

struct PicardOptions {
    double tol = 1e-8;
    int max_iter = 200;
};

/// The projection-correction map: (pi x)(t) = x(t) before the first zero,
/// P x(t) + Q (x(t) - x(tau(t))) afterwards.
std::vector<Matrix> pi_map(const std::vector<Matrix>& x_path, const ExcursionDecomposition& dec);

/// Fixed-point iteration gamma <- pi(E + integral of alpha gamma), started at
/// gamma == E, trapezoidal quadrature on the grid with cadlag one-sided
/// limits at the zeros. Converges once the sup-norm change drops below tol.
DerivativeSolution solve_picard(const AlphaPath& alpha, const ExcursionDecomposition& dec,
                                PicardOptions opts = {});

struct ProductResult {
    Matrix gamma;
    double tail_bound = 0.0;
    std::size_t factors_used = 0;
    std::size_t factors_dropped = 0;
    double dropped_mass = 0.0;
    bool zero_measure_warning = false;
};

/// Ordered product representation at a single time: the propagator since the
/// last zero, times P-sandwiched propagators over all inter-zero gaps (later
/// gaps multiply on the left), times the propagator up to the first hit.
/// Gaps shorter than min_length are skipped; the bound on the resulting error
/// is attached. Before the first hit this reduces to the plain propagator.
ProductResult product_formula(const AlphaPath& alpha, const ExcursionDecomposition& dec, double t,
                              double min_length);

/// Product representation evaluated at every grid node in one sweep.
DerivativeSolution solve_product(const AlphaPath& alpha, const ExcursionDecomposition& dec,
                                 double min_length);

/// (sum of dropped factor norms) * exp(sum of all factor norms): upper bound
/// on the distance between the truncated product and any refinement of it.
double product_tail_bound(std::span<const double> dropped_norms, double total_norm_sum);

/// alpha(t) = grad a(phi_t(x)) and beta(t) = last state coordinate, then one
/// of the two solvers over the whole grid. min_length < 0 means one grid cell.
DerivativeSolution derivative_for_flow(const ReflectedPath& path, const DriftSpec& drift,
                                       DerivativeSolution::Method method, PicardOptions opts = {},
                                       double min_length = -1.0);

/// Central difference of the flow map under shared noise, one coordinate.
Vector finite_difference(const Vector& x, double h, int coordinate, const DriftSpec& drift,
                         const NoisePath& noise, double t);

struct ResidualReport {
    double tangential = 0.0; // P-part equation
    double normal = 0.0;     // Q-part equation
    double max() const { return tangential > normal ? tangential : normal; }
};

/// Discrete residual of the integral system for a given matrix path, using
/// the same cadlag-aware trapezoidal quadrature the Picard solver uses.
ResidualReport residual_report(const std::vector<Matrix>& gamma, const AlphaPath& alpha,
                               const ExcursionDecomposition& dec);

/// True when a boundary visit of one path falls strictly inside an excursion
/// of the other that is at least min_cells grid cells long: the excursion
/// structures differ materially, the mark of a start near the critical set.
bool decompositions_materially_differ(const ExcursionDecomposition& a,
                                      const ExcursionDecomposition& b, std::size_t min_cells);

} // namespace rflow
