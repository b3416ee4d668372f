#include "rflow/example2d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rflow/parallel.hpp"

namespace rflow {
namespace example2d {

double f_closed_form(const ExcursionDecomposition& dec, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("f_closed_form: need t >= 0");
    if (!dec.hits_boundary() || t < dec.sigma0()) return growth_factor(t);
    const std::size_t k_t = dec.grid.index(t);
    double f = growth_factor(dec.grid.time(dec.zeros.front()));
    double prev_time = dec.grid.time(dec.zeros.front());
    for (std::size_t j = 1; j < dec.zeros.size() && dec.zeros[j] <= k_t; ++j) {
        const double z_time = dec.grid.time(dec.zeros[j]);
        f *= growth_factor(z_time - prev_time);
        prev_time = z_time;
    }
    f *= growth_factor(t - prev_time);
    return f;
}

Lemma4Result lemma4_check(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("lemma4_check: empty input");
    double sum = 0.0;
    double lhs = 1.0;
    for (double a : values) {
        if (!(a > 0.0) || !std::isfinite(a))
            throw std::invalid_argument("lemma4_check: values must be positive and finite");
        sum += a;
        lhs *= growth_factor(a);
    }
    const double rhs = growth_factor(sum);
    if (values.size() >= 2 && !(lhs < rhs))
        throw std::logic_error("lemma4_check: merged factor failed to dominate");
    return Lemma4Result{lhs, rhs, rhs - lhs};
}

namespace {

struct StartResult {
    double f = 0.0;
    bool hit = false;
    ExcursionDecomposition dec;
};

// Largest merge-based jump bound between the decompositions of two adjacent
// starts: a zero of the lower path strictly inside an excursion of the upper
// path splits that factor, and the split loses at least
// (e^{2(tau - s)} - 1)(e^{2(s - sigma)} - 1) / 4.
double merge_lower_bound(const ExcursionDecomposition& low, const ExcursionDecomposition& high,
                         double t) {
    double best = 0.0;
    for (const Excursion& e : high.excursions) {
        const double sigma_time = high.grid.time(e.begin);
        const double tau_time = e.closed ? high.grid.time(e.end) : t;
        auto it = std::upper_bound(low.zeros.begin(), low.zeros.end(), e.begin);
        for (; it != low.zeros.end() && *it < e.end; ++it) {
            const double z_time = low.grid.time(*it);
            const double bound = 0.25 * (std::exp(2.0 * (tau_time - z_time)) - 1.0) *
                                 (std::exp(2.0 * (z_time - sigma_time)) - 1.0);
            best = std::max(best, bound);
        }
    }
    return best;
}

double local_trend(const std::vector<double>& diffs, std::size_t i) {
    constexpr std::size_t window = 8;
    const std::size_t lo = i > window ? i - window : 0;
    const std::size_t hi = std::min(diffs.size(), i + window + 1);
    std::vector<double> mags;
    mags.reserve(hi - lo);
    for (std::size_t j = lo; j < hi; ++j)
        if (j != i) mags.push_back(std::abs(diffs[j]));
    if (mags.empty()) return 0.0;
    std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
    return mags[mags.size() / 2];
}

} // namespace

ScanReport scan_discontinuity(const ScanParams& params) {
    if (params.n_points < 3) throw std::invalid_argument("scan_discontinuity: need n_points >= 3");
    if (!(params.x2 > 0.0)) throw std::invalid_argument("scan_discontinuity: need x2 > 0");
    if (!(params.t > 0.0) || !(params.dt > 0.0))
        throw std::invalid_argument("scan_discontinuity: need t, dt > 0");

    const auto n_steps = static_cast<std::size_t>(std::llround(params.t / params.dt));
    const TimeGrid grid(params.t, std::max<std::size_t>(1, n_steps));
    const NoisePath noise = sample_noise(grid, 2, params.seed);
    const DriftSpec drift = DriftSpec::example2d();

    ScanReport report;
    report.t = params.t;
    report.x2 = params.x2;
    report.seed = params.seed;
    report.x1_grid.resize(params.n_points);
    for (std::size_t i = 0; i < params.n_points; ++i)
        report.x1_grid[i] = params.x1_min + (params.x1_max - params.x1_min) *
                                                (static_cast<double>(i) /
                                                 static_cast<double>(params.n_points - 1));

    std::vector<StartResult> results(params.n_points);
    parallel_for(params.n_points, params.workers, [&](std::size_t i) {
        Vector x(2);
        x << report.x1_grid[i], params.x2;
        const ReflectedPath path = solve_rsde(x, drift, noise);
        StartResult& r = results[i];
        r.dec = decompose(grid, path.boundary_coordinate());
        r.hit = r.dec.hits_boundary();
        r.f = f_closed_form(r.dec, params.t);
    });

    report.f_values.resize(params.n_points);
    report.hit.resize(params.n_points);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < params.n_points; ++i) {
        report.f_values[i] = results[i].f;
        report.hit[i] = results[i].hit ? 1 : 0;
        hits += results[i].hit ? 1 : 0;
    }
    report.hit_fraction = static_cast<double>(hits) / static_cast<double>(params.n_points);
    report.vacuous = hits == 0;

    std::vector<double> diffs(params.n_points - 1);
    for (std::size_t i = 0; i + 1 < params.n_points; ++i) {
        diffs[i] = report.f_values[i + 1] - report.f_values[i];
        if (diffs[i] < 0.0) ++report.monotone_violations;
    }
    for (std::size_t i = 0; i + 1 < params.n_points; ++i) {
        const double threshold = std::max(5.0 * local_trend(diffs, i), 1e-3);
        if (diffs[i] > threshold) {
            JumpEvent ev;
            ev.left_index = i;
            ev.x1_left = report.x1_grid[i];
            ev.x1_right = report.x1_grid[i + 1];
            ev.size = diffs[i];
            ev.lower_bound = merge_lower_bound(results[i].dec, results[i + 1].dec, params.t);
            report.jumps.push_back(ev);
        }
    }
    return report;
}

NondiffSummary nondifferentiability_experiment(const NondiffParams& params) {
    NondiffSummary summary;
    summary.n_seeds = params.n_seeds;

    std::vector<ScanReport> reports(params.n_seeds);
    parallel_for(params.n_seeds, params.workers, [&](std::size_t s) {
        ScanParams sp;
        sp.x1_min = params.x1_min;
        sp.x1_max = params.x1_max;
        sp.n_points = params.n_points;
        sp.x2 = params.x2;
        sp.t = params.t;
        sp.dt = params.dt;
        sp.seed = params.base_seed + s;
        sp.workers = 1;
        reports[s] = scan_discontinuity(sp);
    });

    for (const ScanReport& rep : reports) {
        if (rep.vacuous) {
            ++summary.vacuous_runs;
            continue;
        }
        // monotonicity makes the hit set a prefix of the x1 grid
        std::size_t hit_count = 0;
        while (hit_count < rep.hit.size() && rep.hit[hit_count]) ++hit_count;

        std::vector<char> jump_in_chunk(params.n_subintervals, 0);
        bool any = false;
        for (const JumpEvent& ev : rep.jumps) {
            if (ev.left_index + 1 >= hit_count) continue; // outside the hit region
            any = true;
            const std::size_t chunk = ev.left_index * params.n_subintervals / hit_count;
            jump_in_chunk[std::min(chunk, params.n_subintervals - 1)] = 1;
        }
        if (any) ++summary.runs_with_jump;
        bool dense = hit_count >= 2 * params.n_subintervals;
        for (char c : jump_in_chunk) dense = dense && c;
        if (dense) ++summary.dense_runs;
    }
    const double denom = static_cast<double>(summary.n_seeds - summary.vacuous_runs);
    if (denom > 0.0) {
        summary.fraction_with_jump = static_cast<double>(summary.runs_with_jump) / denom;
        summary.fraction_dense = static_cast<double>(summary.dense_runs) / denom;
    }
    return summary;
}

} // namespace example2d
} // namespace rflow
