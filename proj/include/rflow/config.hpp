#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rflow/sde.hpp"

namespace rflow {

/// Experiment description. Serializes to a flat key-value file with
/// [run] / [drift] / [scan] sections; doubles are written with 17 significant
/// digits so save/load round-trips losslessly.
struct ExperimentConfig {
    // [run]
    int dimension = 2;
    double t_end = 1.0;
    double dt = 1e-4;
    std::uint64_t seed = 42;
    std::size_t n_seeds = 1;
    std::string method = "both"; // picard | product | both
    double tol = 1e-8;
    int max_iter = 200;
    double min_length = 0.0; // 0 -> one grid cell
    unsigned workers = 0;    // 0 -> all hardware threads
    std::string out_dir = "out";
    std::vector<std::vector<double>> starts = {{0.25, 0.5}};

    // [drift]
    std::string drift_kind = "linear"; // zero | linear
    std::vector<double> drift_matrix = {1.0, 1.0, 1.0, 1.0}; // row-major d x d

    // [scan]
    double scan_x1_min = -1.0;
    double scan_x1_max = 1.0;
    std::size_t scan_points = 512;
    double scan_x2 = 0.1;
    double scan_t = 1.0;

    bool operator==(const ExperimentConfig&) const = default;

    /// Throws std::runtime_error describing the first offending field.
    void validate() const;

    DriftSpec drift() const;
    TimeGrid grid() const;
    double effective_min_length() const { return min_length > 0.0 ? min_length : dt; }

    std::string to_string() const;
    static ExperimentConfig from_string(const std::string& text);
    void save(const std::filesystem::path& file) const;
    static ExperimentConfig load(const std::filesystem::path& file);
};

} // namespace rflow
