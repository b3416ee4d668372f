#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rflow/excursions.hpp"
#include "rflow/sde.hpp"

namespace rflow {
namespace example2d {

/// (e^{2x} + 1) / 2: the (1,1) propagator entry of the all-ones drift matrix
/// over an interval of length x. Every factor exceeds 1 for x > 0.
inline double growth_factor(double length) { return 0.5 * (std::exp(2.0 * length) + 1.0); }

/// Scalar derivative of the first coordinate in its own initial value,
/// assembled from the zero structure: one factor per inter-zero gap, one for
/// the stretch before the first hit and one since the last zero. Equals the
/// full propagator factor (e^{2t}+1)/2 when the path never touches by t.
double f_closed_form(const ExcursionDecomposition& dec, double t);

struct Lemma4Result {
    double lhs; // product of single-interval factors
    double rhs; // factor of the summed interval
    double margin;
};

/// prod (e^{a_i}+1)/2 against (e^{sum a_i}+1)/2; strict inequality for two or
/// more positive terms.
Lemma4Result lemma4_check(std::span<const double> values);

struct JumpEvent {
    std::size_t left_index = 0; // jump between x1_grid[left_index] and the next point
    double x1_left = 0.0;
    double x1_right = 0.0;
    double size = 0.0;
    double lower_bound = 0.0; // from the merged-excursion inequality; 0 if no merge found
};

struct ScanParams {
    double x1_min = -1.0;
    double x1_max = 1.0;
    std::size_t n_points = 512;
    double x2 = 0.1;
    double t = 1.0;
    double dt = 1e-4;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

struct ScanReport {
    double t = 0.0;
    double x2 = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> x1_grid;
    std::vector<double> f_values;
    std::vector<char> hit; // sigma(x) observed within [0, t]
    std::vector<JumpEvent> jumps;
    std::size_t monotone_violations = 0;
    double hit_fraction = 0.0;
    bool vacuous = false; // no start reached the boundary
};

/// All starts (x1_i, x2) under one shared noise; f per start from its own
/// zero structure. Jumps are adjacent differences that exceed
/// max(5 * local trend, 1e-3); each gets the merge-based lower bound
/// (e^{2(tau-s)}-1)(e^{2(s-sigma)}-1)/4 evaluated from the realized
/// decompositions.
ScanReport scan_discontinuity(const ScanParams& params);

struct NondiffParams {
    double x1_min = -1.0;
    double x1_max = 1.0;
    double x2 = 0.1;
    double t = 1.0;
    std::size_t n_seeds = 100;
    std::size_t n_points = 257;
    std::size_t n_subintervals = 4;
    double dt = 1e-4;
    std::uint64_t base_seed = 0;
    unsigned workers = 1;
};

struct NondiffSummary {
    std::size_t n_seeds = 0;
    std::size_t vacuous_runs = 0;    // no start hit the boundary
    std::size_t runs_with_jump = 0;  // at least one jump among hit points
    std::size_t dense_runs = 0;      // every sampled sub-interval of the hit region has a jump
    double fraction_with_jump = 0.0; // among non-vacuous runs
    double fraction_dense = 0.0;     // among non-vacuous runs
};

/// Repeats the scan over seeds and checks that jumps appear inside every
/// sampled sub-interval of the region where the boundary was reached.
NondiffSummary nondifferentiability_experiment(const NondiffParams& params);

} // namespace example2d
} // namespace rflow
