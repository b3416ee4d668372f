#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rflow/matrix.hpp"
#include "rflow/noise.hpp"

namespace rflow {

/// Drift a(x) together with its Jacobian. For the linear kind a(x) = Ax and
/// grad a == A everywhere.
struct DriftSpec {
    enum class Kind { linear, custom };

    Kind kind = Kind::linear;
    int dim = 1;
    Matrix a_linear;
    std::function<Vector(const Vector&)> a_fn;
    std::function<Matrix(const Vector&)> grad_fn;
    double grad_bound = 0.0;

    static DriftSpec zero(int d);
    static DriftSpec linear(const Matrix& a);
    static DriftSpec custom(int d, std::function<Vector(const Vector&)> a,
                            std::function<Matrix(const Vector&)> grad, double bound);
    /// The 2x2 all-ones drift matrix used throughout the planar experiments.
    static DriftSpec example2d();

    Vector drift_at(const Vector& x) const;
    Matrix gradient_at(const Vector& x) const;
};

/// Flow trajectory in the half-space: states row k is phi_{t_k}(x), and
/// local_time[k] the accumulated boundary push L(t_k, x).
struct ReflectedPath {
    TimeGrid grid;
    int dim = 1;
    Vector start;
    std::vector<double> states;     // (n_steps + 1) * dim, row-major
    std::vector<double> local_time; // n_steps + 1

    double state(std::size_t k, int coord) const {
        return states[k * static_cast<std::size_t>(dim) + static_cast<std::size_t>(coord)];
    }
    Vector state_at(std::size_t k) const;
    /// beta(t_k) = last coordinate of the state; 0.0 exactly at boundary contact.
    std::vector<double> boundary_coordinate() const;
};

struct SkorokhodResult {
    std::vector<double> reflected;
    std::vector<double> local_time;
};

/// Minimal push keeping z nonnegative: L_k = max(0, max_{j<=k}(-z_j)) as a
/// running maximum, reflected_k = z_k + L_k. Boundary contact lands on 0.0
/// exactly, and L increases only at contact steps.
SkorokhodResult skorokhod_map(std::span<const double> z);

/// Euler-Maruyama step on every coordinate, then the running-maximum
/// correction on the normal coordinate.
ReflectedPath solve_rsde(const Vector& x, const DriftSpec& drift, const NoisePath& noise);

/// All starts driven by the identical noise; output order matches input.
std::vector<ReflectedPath> solve_rsde_shared(const std::vector<Vector>& xs, const DriftSpec& drift,
                                             const NoisePath& noise);

} // namespace rflow
