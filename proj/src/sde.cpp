#include "rflow/sde.hpp"

#include <algorithm>
#include <stdexcept>

namespace rflow {

DriftSpec DriftSpec::zero(int d) { return linear(Matrix::Zero(d, d)); }

DriftSpec DriftSpec::linear(const Matrix& a) {
    require_finite(a, "DriftSpec::linear");
    if (a.rows() != a.cols()) throw std::invalid_argument("DriftSpec::linear: matrix must be square");
    DriftSpec spec;
    spec.kind = Kind::linear;
    spec.dim = static_cast<int>(a.rows());
    spec.a_linear = a;
    spec.grad_bound = operator_norm(a);
    return spec;
}

DriftSpec DriftSpec::custom(int d, std::function<Vector(const Vector&)> a,
                            std::function<Matrix(const Vector&)> grad, double bound) {
    if (d < 1) throw std::invalid_argument("DriftSpec::custom: dim must be >= 1");
    DriftSpec spec;
    spec.kind = Kind::custom;
    spec.dim = d;
    spec.a_fn = std::move(a);
    spec.grad_fn = std::move(grad);
    spec.grad_bound = bound;
    return spec;
}

DriftSpec DriftSpec::example2d() {
    Matrix a(2, 2);
    a << 1.0, 1.0, 1.0, 1.0;
    return linear(a);
}

Vector DriftSpec::drift_at(const Vector& x) const {
    return kind == Kind::linear ? Vector(a_linear * x) : a_fn(x);
}

Matrix DriftSpec::gradient_at(const Vector& x) const {
    return kind == Kind::linear ? a_linear : grad_fn(x);
}

Vector ReflectedPath::state_at(std::size_t k) const {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = state(k, i);
    return v;
}

std::vector<double> ReflectedPath::boundary_coordinate() const {
    std::vector<double> beta(grid.n_nodes());
    for (std::size_t k = 0; k < beta.size(); ++k) beta[k] = state(k, dim - 1);
    return beta;
}

SkorokhodResult skorokhod_map(std::span<const double> z) {
    if (z.empty()) throw std::invalid_argument("skorokhod_map: empty path");
    if (!(z[0] >= 0.0)) throw std::invalid_argument("skorokhod_map: start outside half-space");
    SkorokhodResult out;
    out.reflected.resize(z.size());
    out.local_time.resize(z.size());
    double running = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        running = std::max(running, -z[k]);
        out.local_time[k] = running;
        out.reflected[k] = z[k] + running;
    }
    return out;
}

ReflectedPath solve_rsde(const Vector& x, const DriftSpec& drift, const NoisePath& noise) {
    const int d = drift.dim;
    if (x.size() != d) throw std::invalid_argument("solve_rsde: start dimension mismatch");
    if (noise.dim != d) throw std::invalid_argument("solve_rsde: noise dimension mismatch");
    if (!(x(d - 1) >= 0.0)) throw std::invalid_argument("solve_rsde: start outside half-space");
    if (!x.allFinite()) throw std::invalid_argument("solve_rsde: non-finite start");

    const TimeGrid& grid = noise.grid;
    const double dt = grid.dt();
    const std::size_t n = grid.n_steps;

    ReflectedPath path{grid, d, x, {}, {}};
    path.states.resize((n + 1) * static_cast<std::size_t>(d));
    path.local_time.resize(n + 1);

    Vector st = x;
    // The normal coordinate keeps its free accumulation z alongside the
    // running maximum L, so contact steps land on 0.0 exactly and the
    // drift-free path reproduces the plain reflection formula bit for bit.
    double z = x(d - 1);
    double local = 0.0;

    for (int i = 0; i < d; ++i) path.states[static_cast<std::size_t>(i)] = st(i);
    path.local_time[0] = 0.0;

    for (std::size_t k = 0; k < n; ++k) {
        const Vector a = drift.drift_at(st);
        for (int i = 0; i < d - 1; ++i) st(i) = st(i) + (a(i) * dt + noise.increment(k, i));
        z = z + (a(d - 1) * dt + noise.increment(k, d - 1));
        local = std::max(local, -z);
        st(d - 1) = z + local;
        double* row = path.states.data() + (k + 1) * static_cast<std::size_t>(d);
        for (int i = 0; i < d; ++i) row[i] = st(i);
        path.local_time[k + 1] = local;
    }
    return path;
}

std::vector<ReflectedPath> solve_rsde_shared(const std::vector<Vector>& xs, const DriftSpec& drift,
                                             const NoisePath& noise) {
    std::vector<ReflectedPath> paths;
    paths.reserve(xs.size());
    for (const Vector& x : xs) paths.push_back(solve_rsde(x, drift, noise));
    return paths;
}

} // namespace rflow
