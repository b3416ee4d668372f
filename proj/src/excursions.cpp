#include "rflow/excursions.hpp"

#include <algorithm>
#include <stdexcept>

namespace rflow {

std::size_t ExcursionDecomposition::last_zero_index(std::size_t k) const {
    auto it = std::upper_bound(zeros.begin(), zeros.end(), k);
    if (it == zeros.begin())
        throw std::invalid_argument("last_zero_index: before first boundary visit");
    return *(it - 1);
}

double ExcursionDecomposition::last_zero_time(double t) const {
    if (!first_zero || t < sigma0())
        throw std::invalid_argument("last_zero_time: tau undefined before first hit");
    return grid.time(last_zero_index(grid.index(t)));
}

std::vector<std::size_t> ExcursionDecomposition::last_zero_table() const {
    std::vector<std::size_t> table(grid.n_nodes(), npos);
    std::size_t last = npos;
    std::size_t next = 0;
    for (std::size_t k = 0; k < table.size(); ++k) {
        if (next < zeros.size() && zeros[next] == k) last = zeros[next++];
        table[k] = last;
    }
    return table;
}

std::vector<std::size_t> ExcursionDecomposition::prev_zero_table() const {
    std::vector<std::size_t> table(grid.n_nodes(), npos);
    std::size_t last = npos;
    std::size_t next = 0;
    for (std::size_t k = 0; k < table.size(); ++k) {
        table[k] = last;
        if (next < zeros.size() && zeros[next] == k) {
            last = k;
            ++next;
        }
    }
    return table;
}

ExcursionDecomposition decompose(const TimeGrid& grid, std::span<const double> beta) {
    if (beta.size() != grid.n_nodes())
        throw std::invalid_argument("decompose: need one value per grid node");
    ExcursionDecomposition dec;
    dec.grid = grid;
    for (std::size_t k = 0; k < beta.size(); ++k) {
        if (beta[k] < 0.0) throw std::invalid_argument("decompose: negative value");
        if (beta[k] == 0.0) dec.zeros.push_back(k);
    }
    dec.zero_set_measure = grid.dt() * static_cast<double>(dec.zeros.size());
    if (dec.zeros.empty()) return dec;
    dec.first_zero = dec.zeros.front();

    // positive runs between consecutive zeros, plus the open tail
    for (std::size_t i = 0; i + 1 < dec.zeros.size(); ++i) {
        if (dec.zeros[i + 1] > dec.zeros[i] + 1)
            dec.excursions.push_back(Excursion{dec.zeros[i], dec.zeros[i + 1], true});
    }
    if (dec.zeros.back() < grid.n_steps)
        dec.excursions.push_back(Excursion{dec.zeros.back(), grid.n_steps, false});
    return dec;
}

TruncationResult truncate(const ExcursionDecomposition& dec, double min_length) {
    if (!(min_length >= 0.0)) throw std::invalid_argument("truncate: min_length must be >= 0");
    TruncationResult out;
    out.decomposition = dec;
    out.decomposition.excursions.clear();
    const double dt = dec.grid.dt();
    for (const Excursion& e : dec.excursions) {
        const double len = dt * static_cast<double>(e.end - e.begin);
        if (len < min_length) {
            out.dropped_mass += len;
            ++out.dropped_count;
        } else {
            out.decomposition.excursions.push_back(e);
        }
    }
    return out;
}

} // namespace rflow
