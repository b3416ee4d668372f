#include "rflow/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace rflow {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string path_csv(const ReflectedPath& path) {
    std::ostringstream out;
    out << "time";
    for (int i = 1; i <= path.dim; ++i) out << ",x_" << i;
    out << ",L\n";
    for (std::size_t k = 0; k < path.grid.n_nodes(); ++k) {
        out << fmt17(path.grid.time(k));
        for (int i = 0; i < path.dim; ++i) out << ',' << fmt17(path.state(k, i));
        out << ',' << fmt17(path.local_time[k]) << '\n';
    }
    return out.str();
}

std::string derivative_csv(const DerivativeSolution& sol) {
    const char* method = sol.method == DerivativeSolution::Method::picard ? "picard" : "product";
    const auto d = sol.gamma.empty() ? 0 : sol.gamma.front().rows();
    std::ostringstream out;
    out << "time";
    for (Eigen::Index i = 1; i <= d; ++i)
        for (Eigen::Index j = 1; j <= d; ++j) out << ",g_" << i << j;
    out << ",method,residual\n";
    for (std::size_t k = 0; k < sol.gamma.size(); ++k) {
        out << fmt17(sol.grid.time(k));
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) out << ',' << fmt17(sol.gamma[k](i, j));
        out << ',' << method << ',' << fmt17(sol.residual) << '\n';
    }
    return out.str();
}

std::string scan_csv(const example2d::ScanReport& report) {
    std::vector<char> jump_flag(report.x1_grid.size(), 0);
    for (const auto& ev : report.jumps) {
        jump_flag[ev.left_index] = 1;
        jump_flag[ev.left_index + 1] = 1;
    }
    std::ostringstream out;
    out << "x1,f,jump_flag\n";
    for (std::size_t i = 0; i < report.x1_grid.size(); ++i)
        out << fmt17(report.x1_grid[i]) << ',' << fmt17(report.f_values[i]) << ','
            << int(jump_flag[i]) << '\n';
    return out.str();
}

nlohmann::json decomposition_json(const ExcursionDecomposition& dec) {
    nlohmann::json j;
    j["sigma0"] = dec.hits_boundary() ? nlohmann::json(dec.sigma0()) : nlohmann::json(nullptr);
    j["zero_measure"] = dec.zero_set_measure;
    auto intervals = nlohmann::json::array();
    for (const Excursion& e : dec.excursions) {
        nlohmann::json end =
            e.closed ? nlohmann::json(dec.grid.time(e.end)) : nlohmann::json(nullptr);
        intervals.push_back({dec.grid.time(e.begin), end});
    }
    j["intervals"] = intervals;
    return j;
}

nlohmann::json derivative_metadata_json(const DerivativeSolution& sol) {
    nlohmann::json j;
    j["method"] = sol.method == DerivativeSolution::Method::picard ? "picard" : "product";
    j["residual"] = sol.residual;
    if (sol.method == DerivativeSolution::Method::picard) {
        j["iterations"] = sol.iterations;
        j["last_delta"] = sol.last_delta;
    } else {
        j["tail_bound"] = sol.tail_bound;
        j["min_length"] = sol.truncation_min_length;
        j["factors_used"] = sol.factors_used;
        j["factors_dropped"] = sol.factors_dropped;
    }
    return j;
}

nlohmann::json scan_summary_json(const example2d::ScanReport& report) {
    nlohmann::json j;
    j["t"] = report.t;
    j["x2"] = report.x2;
    j["seed"] = report.seed;
    j["n_points"] = report.x1_grid.size();
    j["hit_fraction"] = report.hit_fraction;
    j["vacuous"] = report.vacuous;
    j["monotone_violations"] = report.monotone_violations;
    auto jumps = nlohmann::json::array();
    for (const auto& ev : report.jumps) {
        jumps.push_back({{"x1_left", ev.x1_left},
                         {"x1_right", ev.x1_right},
                         {"size", ev.size},
                         {"lower_bound", ev.lower_bound}});
    }
    j["jumps"] = jumps;
    return j;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

} // namespace rflow
