#include "rflow/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rflow/io.hpp"

namespace rflow {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_doubles(const std::string& s, char sep) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (item.empty()) continue;
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::runtime_error("bad number: '" + item + "'");
    }
    return out;
}

std::string join_doubles(const std::vector<double>& v, char sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += fmt17(v[i]);
    }
    return out;
}

} // namespace

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::runtime_error("config: " + msg); };
    if (dimension < 1 || dimension > 16) fail("dimension must be in [1, 16]");
    if (!(t_end > 0.0)) fail("T must be positive");
    if (!(dt > 0.0) || dt > t_end) fail("dt must be in (0, T]");
    if (!(tol > 0.0)) fail("tol must be positive");
    if (max_iter < 1) fail("max_iter must be >= 1");
    if (min_length < 0.0) fail("min_length must be >= 0");
    if (method != "picard" && method != "product" && method != "both")
        fail("method must be picard, product or both");
    if (drift_kind != "zero" && drift_kind != "linear") fail("drift kind must be zero or linear");
    if (drift_kind == "linear" &&
        drift_matrix.size() != static_cast<std::size_t>(dimension) * dimension)
        fail("drift matrix needs dimension^2 entries");
    for (double v : drift_matrix)
        if (!std::isfinite(v)) fail("drift matrix entries must be finite");
    if (starts.empty()) fail("need at least one start point");
    for (const auto& s : starts) {
        if (s.size() != static_cast<std::size_t>(dimension)) fail("start dimension mismatch");
        if (!(s.back() >= 0.0)) fail("start outside the half-space");
        for (double v : s)
            if (!std::isfinite(v)) fail("start entries must be finite");
    }
    if (n_seeds < 1) fail("n_seeds must be >= 1");
    if (scan_points < 3) fail("scan n_points must be >= 3");
    if (!(scan_x1_min < scan_x1_max)) fail("scan range must be nonempty");
    if (!(scan_x2 > 0.0)) fail("scan x2 must be positive");
    if (!(scan_t > 0.0)) fail("scan t must be positive");
}

DriftSpec ExperimentConfig::drift() const {
    if (drift_kind == "zero") return DriftSpec::zero(dimension);
    Matrix a(dimension, dimension);
    for (int i = 0; i < dimension; ++i)
        for (int j = 0; j < dimension; ++j)
            a(i, j) = drift_matrix[static_cast<std::size_t>(i) * dimension + j];
    return DriftSpec::linear(a);
}

TimeGrid ExperimentConfig::grid() const {
    const auto n = static_cast<std::size_t>(std::llround(t_end / dt));
    return TimeGrid(t_end, std::max<std::size_t>(1, n));
}

std::string ExperimentConfig::to_string() const {
    std::ostringstream out;
    out << "[run]\n";
    out << "dimension = " << dimension << '\n';
    out << "T = " << fmt17(t_end) << '\n';
    out << "dt = " << fmt17(dt) << '\n';
    out << "seed = " << seed << '\n';
    out << "n_seeds = " << n_seeds << '\n';
    out << "method = " << method << '\n';
    out << "tol = " << fmt17(tol) << '\n';
    out << "max_iter = " << max_iter << '\n';
    out << "min_length = " << fmt17(min_length) << '\n';
    out << "workers = " << workers << '\n';
    out << "out = " << out_dir << '\n';
    std::string starts_text;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        if (i) starts_text += "; ";
        starts_text += join_doubles(starts[i], ',');
    }
    out << "starts = " << starts_text << '\n';
    out << "\n[drift]\n";
    out << "kind = " << drift_kind << '\n';
    out << "matrix = " << join_doubles(drift_matrix, ',') << '\n';
    out << "\n[scan]\n";
    out << "x1_min = " << fmt17(scan_x1_min) << '\n';
    out << "x1_max = " << fmt17(scan_x1_max) << '\n';
    out << "n_points = " << scan_points << '\n';
    out << "x2 = " << fmt17(scan_x2) << '\n';
    out << "t = " << fmt17(scan_t) << '\n';
    return out.str();
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
    ExperimentConfig cfg;
    cfg.starts.clear();
    cfg.drift_matrix.clear();
    bool saw_starts = false, saw_matrix = false;

    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("config line " + std::to_string(line_no) +
                                         ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;
        try {
            if (full == "run.dimension") cfg.dimension = std::stoi(value);
            else if (full == "run.T") cfg.t_end = std::stod(value);
            else if (full == "run.dt") cfg.dt = std::stod(value);
            else if (full == "run.seed") cfg.seed = std::stoull(value);
            else if (full == "run.n_seeds") cfg.n_seeds = std::stoull(value);
            else if (full == "run.method") cfg.method = value;
            else if (full == "run.tol") cfg.tol = std::stod(value);
            else if (full == "run.max_iter") cfg.max_iter = std::stoi(value);
            else if (full == "run.min_length") cfg.min_length = std::stod(value);
            else if (full == "run.workers") cfg.workers = static_cast<unsigned>(std::stoul(value));
            else if (full == "run.out") cfg.out_dir = value;
            else if (full == "run.starts") {
                saw_starts = true;
                std::stringstream ss(value);
                std::string group;
                while (std::getline(ss, group, ';')) {
                    group = trim(group);
                    if (!group.empty()) cfg.starts.push_back(parse_doubles(group, ','));
                }
            } else if (full == "drift.kind") cfg.drift_kind = value;
            else if (full == "drift.matrix") {
                saw_matrix = true;
                cfg.drift_matrix = parse_doubles(value, ',');
            } else if (full == "scan.x1_min") cfg.scan_x1_min = std::stod(value);
            else if (full == "scan.x1_max") cfg.scan_x1_max = std::stod(value);
            else if (full == "scan.n_points") cfg.scan_points = std::stoull(value);
            else if (full == "scan.x2") cfg.scan_x2 = std::stod(value);
            else if (full == "scan.t") cfg.scan_t = std::stod(value);
            else
                throw std::runtime_error("unknown key '" + full + "'");
        } catch (const std::runtime_error&) {
            throw;
        } catch (const std::exception& e) {
            throw std::runtime_error("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!saw_starts) cfg.starts = {{0.25, 0.5}};
    if (!saw_matrix) cfg.drift_matrix = {1.0, 1.0, 1.0, 1.0};
    return cfg;
}

void ExperimentConfig::save(const std::filesystem::path& file) const {
    write_file(file, to_string());
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read config: " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
}

} // namespace rflow
