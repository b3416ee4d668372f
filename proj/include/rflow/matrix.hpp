#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rflow/time_grid.hpp"

namespace rflow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

bool is_finite(const Matrix& m);
void require_finite(const Matrix& m, const char* where);

inline Matrix identity(Eigen::Index d) { return Matrix::Identity(d, d); }

/// P = diag(1, ..., 1, 0) projects onto the tangential coordinates,
/// Q = E - P onto the normal (last) coordinate.
Matrix proj_tangential(Eigen::Index d);
Matrix proj_normal(Eigen::Index d);

struct ProjectionPair {
    Matrix P;
    Matrix Q;
    explicit ProjectionPair(Eigen::Index d) : P(proj_tangential(d)), Q(proj_normal(d)) {}
};

/// Induced 2-norm (largest singular value) for d <= 8; Frobenius norm above,
/// kept as a documented sub-multiplicative upper-bound surrogate.
double operator_norm(const Matrix& m);

/// e^{At} by scaling-and-squaring with a Pade approximant.
Matrix mat_exp(const Matrix& a, double t);

/// Generator samples alpha(t_k) on the nodes of a grid; values between nodes
/// are taken piecewise linear.
struct AlphaPath {
    TimeGrid grid;
    std::vector<Matrix> values; // one d x d matrix per node

    AlphaPath() = default;
    AlphaPath(TimeGrid g, std::vector<Matrix> v);
    static AlphaPath constant(TimeGrid g, const Matrix& a);

    Eigen::Index dim() const { return values.empty() ? 0 : values.front().rows(); }
    /// max over nodes of operator_norm(alpha(t_k))
    double sup_norm() const;
};

/// Fundamental solution E_{st} of dE/dt = alpha(t) E, E_{ss} = E.
struct Propagator {
    double s = 0.0;
    double t = 0.0;
    Matrix matrix;
};

/// Advance E across one grid cell [t_k, t_k + dt] with a classical
/// fourth-order step; alpha at the midpoint is the average of the endpoints.
Matrix rk4_cell(const Matrix& alpha_lo, const Matrix& alpha_hi, double dt, const Matrix& e);

/// E_{st} over node range [ks, kt] of the sampling grid.
Matrix propagate_nodes(const AlphaPath& alpha, std::size_t ks, std::size_t kt);

/// E_{st} for grid-aligned times s <= t. Global error is O(dt^4).
Propagator solve_propagator(const AlphaPath& alpha, double s, double t);

} // namespace rflow
