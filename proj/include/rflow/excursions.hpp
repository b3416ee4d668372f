#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rflow/time_grid.hpp"

namespace rflow {

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

/// Maximal run of strictly positive values between two boundary visits.
/// begin/end are node indices of the bounding zeros; an open excursion runs
/// to the end of the grid without returning (end == last node, closed false).
struct Excursion {
    std::size_t begin = 0;
    std::size_t end = 0;
    bool closed = true;

    double length_nodes() const { return static_cast<double>(end - begin); }
};

/// Zero structure of a nonnegative grid path: first hit, ordered excursion
/// intervals, the zero set itself, and the grid measure it carries.
struct ExcursionDecomposition {
    TimeGrid grid;
    std::optional<std::size_t> first_zero; // node of sigma_0, if any
    std::vector<std::size_t> zeros;        // sorted node indices with beta == 0
    std::vector<Excursion> excursions;     // positive runs after sigma_0
    double zero_set_measure = 0.0;

    bool hits_boundary() const { return first_zero.has_value(); }
    /// First-hit time sigma_0, +infinity when the path never touches.
    double sigma0() const {
        return first_zero ? grid.time(*first_zero) : std::numeric_limits<double>::infinity();
    }

    /// Largest zero node <= k. Requires k at or past the first zero.
    std::size_t last_zero_index(std::size_t k) const;
    /// tau(t): last boundary-visit time at or before t. Requires t >= sigma_0.
    double last_zero_time(double t) const;
    /// lz[k] = last zero node <= k, npos before the first zero. O(n) once.
    std::vector<std::size_t> last_zero_table() const;
    /// Same, but with the zero at k itself excluded: the left-limit structure.
    std::vector<std::size_t> prev_zero_table() const;
};

/// Split a nonnegative path into the zero set and its positive runs.
ExcursionDecomposition decompose(const TimeGrid& grid, std::span<const double> beta);

struct TruncationResult {
    ExcursionDecomposition decomposition;
    double dropped_mass = 0.0;
    std::size_t dropped_count = 0;
};

/// Drop excursions shorter than min_length; the report carries the discarded
/// total length for use with the product tail bound. Open excursions count
/// their visible length t_end - sigma_k.
TruncationResult truncate(const ExcursionDecomposition& dec, double min_length);

} // namespace rflow
