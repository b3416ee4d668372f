#include "rflow/matrix.hpp"

#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

namespace rflow {

bool is_finite(const Matrix& m) { return m.allFinite(); }

void require_finite(const Matrix& m, const char* where) {
    if (!m.allFinite()) throw std::invalid_argument(std::string(where) + ": non-finite entries");
}

Matrix proj_tangential(Eigen::Index d) {
    Matrix p = Matrix::Identity(d, d);
    p(d - 1, d - 1) = 0.0;
    return p;
}

Matrix proj_normal(Eigen::Index d) {
    Matrix q = Matrix::Zero(d, d);
    q(d - 1, d - 1) = 1.0;
    return q;
}

double operator_norm(const Matrix& m) {
    require_finite(m, "operator_norm");
    if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
    if (m.rows() <= 8 && m.cols() <= 8) {
        Eigen::JacobiSVD<Matrix> svd(m);
        return svd.singularValues()(0);
    }
    return m.norm();
}

Matrix mat_exp(const Matrix& a, double t) {
    require_finite(a, "mat_exp");
    if (a.rows() != a.cols()) throw std::invalid_argument("mat_exp: matrix must be square");
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("mat_exp: need finite t >= 0");
    return (a * t).exp();
}

AlphaPath::AlphaPath(TimeGrid g, std::vector<Matrix> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n_nodes())
        throw std::invalid_argument("AlphaPath: need one matrix per grid node");
    const Eigen::Index d = values.front().rows();
    for (const Matrix& m : values) {
        if (m.rows() != d || m.cols() != d)
            throw std::invalid_argument("AlphaPath: inconsistent dimensions");
        require_finite(m, "AlphaPath");
    }
}

AlphaPath AlphaPath::constant(TimeGrid g, const Matrix& a) {
    return AlphaPath(g, std::vector<Matrix>(g.n_nodes(), a));
}

double AlphaPath::sup_norm() const {
    double c = 0.0;
    for (const Matrix& m : values) c = std::max(c, operator_norm(m));
    return c;
}

Matrix rk4_cell(const Matrix& alpha_lo, const Matrix& alpha_hi, double dt, const Matrix& e) {
    const Matrix alpha_mid = 0.5 * (alpha_lo + alpha_hi);
    const Matrix k1 = alpha_lo * e;
    const Matrix k2 = alpha_mid * (e + (0.5 * dt) * k1);
    const Matrix k3 = alpha_mid * (e + (0.5 * dt) * k2);
    const Matrix k4 = alpha_hi * (e + dt * k3);
    return e + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Matrix propagate_nodes(const AlphaPath& alpha, std::size_t ks, std::size_t kt) {
    if (ks > kt || kt >= alpha.grid.n_nodes())
        throw std::invalid_argument("propagate_nodes: bad node range");
    const double dt = alpha.grid.dt();
    Matrix e = Matrix::Identity(alpha.dim(), alpha.dim());
    for (std::size_t k = ks; k < kt; ++k)
        e = rk4_cell(alpha.values[k], alpha.values[k + 1], dt, e);
    return e;
}

Propagator solve_propagator(const AlphaPath& alpha, double s, double t) {
    if (!(s <= t)) throw std::invalid_argument("solve_propagator: need s <= t");
    const std::size_t ks = alpha.grid.index(s);
    const std::size_t kt = alpha.grid.index(t);
    return Propagator{s, t, propagate_nodes(alpha, ks, kt)};
}

} // namespace rflow
