#include "rflow/derivative.hpp"

#include <algorithm>
#include <cmath>

namespace rflow {

namespace {

// gamma and its left limit at node k, from x = E + I and the zero tables.
// The last row is the only one the projection correction touches.
void apply_pi_row(Matrix& out, const Matrix& x_here, const Matrix* x_tau) {
    out = x_here;
    if (x_tau) out.row(out.rows() - 1) = x_here.row(x_here.rows() - 1) - x_tau->row(x_tau->rows() - 1);
}

} // namespace

std::vector<Matrix> pi_map(const std::vector<Matrix>& x_path, const ExcursionDecomposition& dec) {
    if (x_path.size() != dec.grid.n_nodes())
        throw std::invalid_argument("pi_map: path must cover the full grid");
    const auto lz = dec.last_zero_table();
    std::vector<Matrix> out(x_path.size());
    for (std::size_t k = 0; k < x_path.size(); ++k)
        apply_pi_row(out[k], x_path[k], lz[k] == npos ? nullptr : &x_path[lz[k]]);
    return out;
}

namespace {

struct PicardWorkspace {
    std::vector<std::size_t> lz;   // last zero <= k
    std::vector<std::size_t> prev; // last zero < k
    std::vector<char> is_zero;

    explicit PicardWorkspace(const ExcursionDecomposition& dec)
        : lz(dec.last_zero_table()), prev(dec.prev_zero_table()), is_zero(dec.grid.n_nodes(), 0) {
        for (std::size_t z : dec.zeros) is_zero[z] = 1;
    }
};

// Cumulative trapezoid of alpha*gamma. Right cell ends use the left limit of
// gamma, so cells ending at a zero integrate the pre-jump branch.
void cumtrapz(const AlphaPath& alpha, const std::vector<Matrix>& gamma,
              const std::vector<Matrix>& gamma_pre_at_zero, const PicardWorkspace& ws,
              const std::vector<std::size_t>& zero_slot, std::vector<Matrix>& integral) {
    const std::size_t n = gamma.size();
    const double half_dt = 0.5 * alpha.grid.dt();
    const Eigen::Index d = gamma.front().rows();
    integral[0].setZero(d, d);
    Matrix f_left = alpha.values[0] * gamma[0];
    Matrix f_right(d, d);
    for (std::size_t k = 1; k < n; ++k) {
        if (ws.is_zero[k]) {
            f_right.noalias() = alpha.values[k] * gamma_pre_at_zero[zero_slot[k]];
            integral[k] = integral[k - 1] + half_dt * (f_left + f_right);
            f_left.noalias() = alpha.values[k] * gamma[k];
        } else {
            f_right.noalias() = alpha.values[k] * gamma[k];
            integral[k] = integral[k - 1] + half_dt * (f_left + f_right);
            f_left = f_right;
        }
    }
}

} // namespace

DerivativeSolution solve_picard(const AlphaPath& alpha, const ExcursionDecomposition& dec,
                                PicardOptions opts) {
    if (alpha.grid.n_nodes() != dec.grid.n_nodes())
        throw std::invalid_argument("solve_picard: alpha and decomposition grids differ");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("solve_picard: tol must be positive");

    const std::size_t n = alpha.grid.n_nodes();
    const Eigen::Index d = alpha.dim();
    const Matrix eye = Matrix::Identity(d, d);
    const PicardWorkspace ws(dec);

    std::vector<std::size_t> zero_slot(n, npos);
    for (std::size_t j = 0; j < dec.zeros.size(); ++j) zero_slot[dec.zeros[j]] = j;

    std::vector<Matrix> gamma(n, eye), gamma_old(n, eye), integral(n, Matrix::Zero(d, d));
    std::vector<Matrix> pre(dec.zeros.size(), eye);

    // gamma = pi(E + I), with the left limit kept separately at each zero
    auto update_gamma = [&]() {
        for (std::size_t k = 0; k < n; ++k) {
            const Matrix x = eye + integral[k];
            if (ws.lz[k] == npos) {
                gamma[k] = x;
            } else {
                gamma[k] = x;
                gamma[k].row(d - 1) = integral[k].row(d - 1) - integral[ws.lz[k]].row(d - 1);
            }
            if (ws.is_zero[k]) {
                Matrix& p = pre[zero_slot[k]];
                p = x;
                if (ws.prev[k] != npos)
                    p.row(d - 1) = integral[k].row(d - 1) - integral[ws.prev[k]].row(d - 1);
            }
        }
    };

    DerivativeSolution sol;
    sol.grid = alpha.grid;
    sol.method = DerivativeSolution::Method::picard;

    double delta = std::numeric_limits<double>::infinity();
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        cumtrapz(alpha, gamma, pre, ws, zero_slot, integral);
        std::swap(gamma, gamma_old);
        update_gamma();
        delta = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            delta = std::max(delta, operator_norm(gamma[k] - gamma_old[k]));
        if (delta < opts.tol) {
            ++iter;
            break;
        }
    }

    sol.gamma = std::move(gamma);
    sol.iterations = iter;
    sol.last_delta = delta;
    sol.residual = residual_report(sol.gamma, alpha, dec).max();
    if (!(delta < opts.tol))
        throw PicardConvergenceError("solve_picard: no convergence within max_iter", delta,
                                     sol.residual);
    return sol;
}

double product_tail_bound(std::span<const double> dropped_norms, double total_norm_sum) {
    double dropped = 0.0;
    for (double v : dropped_norms) {
        if (!(v >= 0.0)) throw std::invalid_argument("product_tail_bound: negative norm");
        dropped += v;
    }
    if (!(total_norm_sum >= 0.0))
        throw std::invalid_argument("product_tail_bound: negative total");
    return dropped * std::exp(total_norm_sum);
}

namespace {

void zero_last_row(Matrix& m) { m.row(m.rows() - 1).setZero(); }

struct ProductSweep {
    Matrix at_target;
    double tail_bound = 0.0;
    std::size_t used = 0;
    std::size_t dropped = 0;
    double dropped_mass = 0.0;
};

// Single left-to-right pass. base carries P * (product of gap factors) *
// E_{0, sigma0}; cur is the propagator since the last zero. Gap factors below
// the length cutoff are skipped and accounted in the tail bound via the
// norm estimate ||E_{st} - E|| <= c (t-s) e^{c (t-s)}.
ProductSweep product_sweep(const AlphaPath& alpha, const ExcursionDecomposition& dec,
                           std::size_t k_target, double min_length,
                           std::vector<Matrix>* all_out) {
    const Eigen::Index d = alpha.dim();
    const double dt = alpha.grid.dt();
    const Matrix eye = Matrix::Identity(d, d);
    const double c_sup = alpha.sup_norm();

    ProductSweep sweep;
    auto store = [&](std::size_t k, const Matrix& g) {
        if (all_out) (*all_out)[k] = g;
    };

    const std::size_t min_cells =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(min_length / dt - 1e-9)));

    Matrix cur = eye;
    store(0, cur);
    if (!dec.first_zero || k_target < *dec.first_zero) {
        for (std::size_t k = 1; k <= (all_out ? alpha.grid.n_steps : k_target); ++k) {
            cur = rk4_cell(alpha.values[k - 1], alpha.values[k], dt, cur);
            store(k, cur);
            if (!all_out && k == k_target) break;
        }
        sweep.at_target = all_out ? (*all_out)[k_target] : cur;
        return sweep;
    }

    const std::size_t sigma = *dec.first_zero;
    const std::size_t last = all_out ? alpha.grid.n_steps : k_target;

    for (std::size_t k = 1; k <= sigma; ++k) {
        cur = rk4_cell(alpha.values[k - 1], alpha.values[k], dt, cur);
        if (k < sigma) store(k, cur);
    }
    Matrix base = cur; // E_{0, sigma0}
    zero_last_row(base);
    store(sigma, base);

    double kept_norm_sum = 0.0;
    double dropped_norm_sum = 0.0;
    std::size_t last_zero = sigma;
    std::size_t next_zero = std::upper_bound(dec.zeros.begin(), dec.zeros.end(), sigma) -
                            dec.zeros.begin();
    cur = eye;
    Matrix tmp(d, d);
    for (std::size_t k = sigma + 1; k <= last; ++k) {
        cur = rk4_cell(alpha.values[k - 1], alpha.values[k], dt, cur);
        const bool zero_here = next_zero < dec.zeros.size() && dec.zeros[next_zero] == k;
        if (zero_here) {
            const std::size_t gap_cells = k - last_zero;
            if (gap_cells >= min_cells) {
                Matrix factor = cur;
                zero_last_row(factor);
                factor.col(d - 1).setZero();
                kept_norm_sum += operator_norm(factor - proj_tangential(d));
                tmp.noalias() = cur * base;
                base = tmp;
                zero_last_row(base);
                ++sweep.used;
            } else {
                const double len = dt * static_cast<double>(gap_cells);
                dropped_norm_sum += c_sup * len * std::exp(c_sup * len);
                sweep.dropped_mass += len;
                ++sweep.dropped;
            }
            cur = eye;
            last_zero = k;
            ++next_zero;
            store(k, base);
        } else {
            if (all_out) {
                tmp.noalias() = cur * base;
                store(k, tmp);
            }
        }
        if (!all_out && k == k_target) break;
    }

    if (all_out) {
        sweep.at_target = (*all_out)[k_target];
    } else {
        const bool target_is_zero = std::binary_search(dec.zeros.begin(), dec.zeros.end(), k_target);
        sweep.at_target = target_is_zero ? base : Matrix(cur * base);
    }
    sweep.tail_bound = dropped_norm_sum * std::exp(kept_norm_sum + dropped_norm_sum);
    return sweep;
}

} // namespace

ProductResult product_formula(const AlphaPath& alpha, const ExcursionDecomposition& dec, double t,
                              double min_length) {
    if (alpha.grid.n_nodes() != dec.grid.n_nodes())
        throw std::invalid_argument("product_formula: alpha and decomposition grids differ");
    const std::size_t k_target = alpha.grid.index(t);
    ProductSweep sweep = product_sweep(alpha, dec, k_target, min_length, nullptr);
    ProductResult out;
    out.gamma = std::move(sweep.at_target);
    out.tail_bound = sweep.tail_bound;
    out.factors_used = sweep.used;
    out.factors_dropped = sweep.dropped;
    out.dropped_mass = sweep.dropped_mass;
    out.zero_measure_warning = dec.zero_set_measure > 0.05 * dec.grid.t_end;
    return out;
}

DerivativeSolution solve_product(const AlphaPath& alpha, const ExcursionDecomposition& dec,
                                 double min_length) {
    if (alpha.grid.n_nodes() != dec.grid.n_nodes())
        throw std::invalid_argument("solve_product: alpha and decomposition grids differ");
    const double min_len = min_length < 0.0 ? alpha.grid.dt() : min_length;
    DerivativeSolution sol;
    sol.grid = alpha.grid;
    sol.method = DerivativeSolution::Method::product;
    sol.gamma.assign(alpha.grid.n_nodes(), Matrix());
    ProductSweep sweep = product_sweep(alpha, dec, alpha.grid.n_steps, min_len, &sol.gamma);
    sol.truncation_min_length = min_len;
    sol.tail_bound = sweep.tail_bound;
    sol.factors_used = sweep.used;
    sol.factors_dropped = sweep.dropped;
    sol.residual = residual_report(sol.gamma, alpha, dec).max();
    return sol;
}

DerivativeSolution derivative_for_flow(const ReflectedPath& path, const DriftSpec& drift,
                                       DerivativeSolution::Method method, PicardOptions opts,
                                       double min_length) {
    if (path.dim != drift.dim)
        throw std::invalid_argument("derivative_for_flow: path and drift dimensions differ");
    const std::size_t n = path.grid.n_nodes();
    std::vector<Matrix> alpha_values(n);
    if (drift.kind == DriftSpec::Kind::linear) {
        std::fill(alpha_values.begin(), alpha_values.end(), drift.a_linear);
    } else {
        for (std::size_t k = 0; k < n; ++k) alpha_values[k] = drift.gradient_at(path.state_at(k));
    }
    AlphaPath alpha(path.grid, std::move(alpha_values));
    const std::vector<double> beta = path.boundary_coordinate();
    const ExcursionDecomposition dec = decompose(path.grid, beta);

    if (method == DerivativeSolution::Method::picard) return solve_picard(alpha, dec, opts);
    return solve_product(alpha, dec, min_length < 0.0 ? path.grid.dt() : min_length);
}

Vector finite_difference(const Vector& x, double h, int coordinate, const DriftSpec& drift,
                         const NoisePath& noise, double t) {
    if (!(h > 0.0)) throw std::invalid_argument("finite_difference: h must be positive");
    if (coordinate < 0 || coordinate >= drift.dim)
        throw std::invalid_argument("finite_difference: bad coordinate");
    Vector xp = x, xm = x;
    xp(coordinate) = x(coordinate) + h;
    xm(coordinate) = x(coordinate) - h;
    if (!(xp(drift.dim - 1) >= 0.0) || !(xm(drift.dim - 1) >= 0.0))
        throw std::invalid_argument("finite_difference: perturbed start leaves the half-space");
    const ReflectedPath pp = solve_rsde(xp, drift, noise);
    const ReflectedPath pm = solve_rsde(xm, drift, noise);
    const std::size_t k = noise.grid.index(t);
    const double gap = xp(coordinate) - xm(coordinate);
    Vector column(drift.dim);
    for (int i = 0; i < drift.dim; ++i) column(i) = (pp.state(k, i) - pm.state(k, i)) / gap;
    return column;
}

ResidualReport residual_report(const std::vector<Matrix>& gamma, const AlphaPath& alpha,
                               const ExcursionDecomposition& dec) {
    const std::size_t n = alpha.grid.n_nodes();
    if (gamma.size() != n) throw std::invalid_argument("residual_report: path length mismatch");
    const Eigen::Index d = alpha.dim();
    const PicardWorkspace ws(dec);
    std::vector<std::size_t> zero_slot(n, npos);
    for (std::size_t j = 0; j < dec.zeros.size(); ++j) zero_slot[dec.zeros[j]] = j;

    // Left limits at the zeros are not stored in the path; recover them from
    // the integral itself by fixed-point refinement. Each pass contracts the
    // pre-value error by roughly dt * ||alpha|| * (number of zeros).
    std::vector<Matrix> pre(dec.zeros.size());
    for (std::size_t j = 0; j < dec.zeros.size(); ++j) pre[j] = gamma[dec.zeros[j]];
    std::vector<Matrix> integral(n, Matrix::Zero(d, d));
    double change = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < 60 && change > 1e-15; ++pass) {
        cumtrapz(alpha, gamma, pre, ws, zero_slot, integral);
        change = 0.0;
        for (std::size_t j = 0; j < dec.zeros.size(); ++j) {
            const std::size_t z = dec.zeros[j];
            Matrix refined = Matrix::Identity(d, d) + integral[z];
            if (ws.prev[z] != npos)
                refined.row(d - 1) = integral[z].row(d - 1) - integral[ws.prev[z]].row(d - 1);
            change = std::max(change, (refined - pre[j]).cwiseAbs().maxCoeff());
            pre[j] = std::move(refined);
        }
        if (dec.zeros.empty()) break;
    }
    cumtrapz(alpha, gamma, pre, ws, zero_slot, integral);

    ResidualReport rep;
    const Matrix eye = Matrix::Identity(d, d);
    for (std::size_t k = 0; k < n; ++k) {
        Matrix r1 = gamma[k] - eye - integral[k];
        r1.row(d - 1).setZero();
        rep.tangential = std::max(rep.tangential, operator_norm(r1));
        Eigen::RowVectorXd r2;
        if (ws.lz[k] == npos) {
            r2 = gamma[k].row(d - 1) - eye.row(d - 1) - integral[k].row(d - 1);
        } else {
            r2 = gamma[k].row(d - 1) - integral[k].row(d - 1) + integral[ws.lz[k]].row(d - 1);
        }
        rep.normal = std::max(rep.normal, r2.norm());
    }
    return rep;
}

bool decompositions_materially_differ(const ExcursionDecomposition& a,
                                      const ExcursionDecomposition& b, std::size_t min_cells) {
    if (a.hits_boundary() != b.hits_boundary()) return true;
    auto zero_inside_long_excursion = [min_cells](const ExcursionDecomposition& zeros_of,
                                                  const ExcursionDecomposition& excursions_of) {
        for (const Excursion& e : excursions_of.excursions) {
            if (e.end - e.begin < min_cells) continue;
            auto it = std::upper_bound(zeros_of.zeros.begin(), zeros_of.zeros.end(), e.begin);
            if (it != zeros_of.zeros.end() && *it < e.end) return true;
        }
        return false;
    };
    return zero_inside_long_excursion(a, b) || zero_inside_long_excursion(b, a);
}

} // namespace rflow
