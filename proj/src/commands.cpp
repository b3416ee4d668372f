#include "rflow/commands.hpp"

#include <filesystem>
#include <ostream>

#include "rflow/example2d.hpp"
#include "rflow/io.hpp"
#include "rflow/parallel.hpp"

namespace rflow {

namespace {

namespace fs = std::filesystem;

fs::path ensure_out_dir(const ExperimentConfig& cfg) {
    fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + dir.string());
    return dir;
}

std::string tag(std::uint64_t seed, std::size_t start_idx) {
    return "s" + std::to_string(seed) + "_x" + std::to_string(start_idx);
}

} // namespace

CommandOutcome cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
    cfg.validate();
    const fs::path dir = ensure_out_dir(cfg);
    const DriftSpec drift = cfg.drift();
    const TimeGrid grid = cfg.grid();

    struct Job {
        std::uint64_t seed;
        std::size_t start_idx;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < cfg.n_seeds; ++s)
        for (std::size_t j = 0; j < cfg.starts.size(); ++j) jobs.push_back({cfg.seed + s, j});

    struct Result {
        ReflectedPath path;
        ExcursionDecomposition dec;
    };
    std::vector<Result> results(jobs.size());
    parallel_for(jobs.size(), cfg.workers, [&](std::size_t i) {
        const NoisePath noise = sample_noise(grid, cfg.dimension, jobs[i].seed);
        Vector x(cfg.dimension);
        for (int c = 0; c < cfg.dimension; ++c) x(c) = cfg.starts[jobs[i].start_idx][c];
        results[i].path = solve_rsde(x, drift, noise);
        results[i].dec = decompose(grid, results[i].path.boundary_coordinate());
    });

    CommandOutcome outcome;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const fs::path file = dir / ("sim_" + tag(jobs[i].seed, jobs[i].start_idx) + ".csv");
        write_file(file, path_csv(results[i].path));
        outcome.files_written.push_back(file.string());
        const auto& dec = results[i].dec;
        log << file.string() << ": sigma=" << (dec.hits_boundary() ? fmt17(dec.sigma0()) : "inf")
            << " excursions=" << dec.excursions.size()
            << " L(T)=" << fmt17(results[i].path.local_time.back()) << '\n';
    }
    return outcome;
}

CommandOutcome cmd_derivative(const ExperimentConfig& cfg, std::ostream& log) {
    cfg.validate();
    const fs::path dir = ensure_out_dir(cfg);
    const DriftSpec drift = cfg.drift();
    const TimeGrid grid = cfg.grid();
    const bool want_picard = cfg.method == "picard" || cfg.method == "both";
    const bool want_product = cfg.method == "product" || cfg.method == "both";

    struct Job {
        std::uint64_t seed;
        std::size_t start_idx;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < cfg.n_seeds; ++s)
        for (std::size_t j = 0; j < cfg.starts.size(); ++j) jobs.push_back({cfg.seed + s, j});

    struct Result {
        DerivativeSolution picard;
        DerivativeSolution product;
        bool picard_ok = false;
        bool product_ok = false;
        bool picard_failed = false;
        double picard_fail_delta = 0.0;
        double picard_fail_residual = 0.0;
        double disagreement = -1.0;
    };
    std::vector<Result> results(jobs.size());
    parallel_for(jobs.size(), cfg.workers, [&](std::size_t i) {
        const NoisePath noise = sample_noise(grid, cfg.dimension, jobs[i].seed);
        Vector x(cfg.dimension);
        for (int c = 0; c < cfg.dimension; ++c) x(c) = cfg.starts[jobs[i].start_idx][c];
        const ReflectedPath path = solve_rsde(x, drift, noise);
        Result& r = results[i];
        if (want_picard) {
            try {
                r.picard = derivative_for_flow(path, drift, DerivativeSolution::Method::picard,
                                               PicardOptions{cfg.tol, cfg.max_iter});
                r.picard_ok = true;
            } catch (const PicardConvergenceError& e) {
                r.picard_failed = true;
                r.picard_fail_delta = e.last_delta;
                r.picard_fail_residual = e.residual;
            }
        }
        if (want_product) {
            r.product = derivative_for_flow(path, drift, DerivativeSolution::Method::product,
                                            PicardOptions{}, cfg.effective_min_length());
            r.product_ok = true;
        }
        if (r.picard_ok && r.product_ok) {
            double d = 0.0;
            for (std::size_t k = 0; k < r.picard.gamma.size(); ++k)
                d = std::max(d, operator_norm(r.picard.gamma[k] - r.product.gamma[k]));
            r.disagreement = d;
        }
    });

    CommandOutcome outcome;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const Result& r = results[i];
        const std::string base = "deriv_" + tag(jobs[i].seed, jobs[i].start_idx);
        nlohmann::json meta;
        meta["seed"] = jobs[i].seed;
        meta["start"] = cfg.starts[jobs[i].start_idx];
        if (r.picard_ok) {
            const fs::path f = dir / (base + "_picard.csv");
            write_file(f, derivative_csv(r.picard));
            outcome.files_written.push_back(f.string());
            meta["picard"] = derivative_metadata_json(r.picard);
        }
        if (r.picard_failed) {
            meta["picard"] = {{"error", "no convergence"},
                              {"last_delta", r.picard_fail_delta},
                              {"residual", r.picard_fail_residual}};
            outcome.exit_code = 1;
        }
        if (r.product_ok) {
            const fs::path f = dir / (base + "_product.csv");
            write_file(f, derivative_csv(r.product));
            outcome.files_written.push_back(f.string());
            meta["product"] = derivative_metadata_json(r.product);
        }
        if (r.disagreement >= 0.0) meta["disagreement"] = r.disagreement;
        const fs::path jf = dir / (base + ".json");
        write_file(jf, meta.dump(2) + "\n");
        outcome.files_written.push_back(jf.string());
        log << jf.string();
        if (r.disagreement >= 0.0) log << ": disagreement=" << fmt17(r.disagreement);
        if (r.picard_failed) log << ": picard failed to converge";
        log << '\n';
    }
    return outcome;
}

CommandOutcome cmd_scan(const ExperimentConfig& cfg, std::ostream& log) {
    cfg.validate();
    const fs::path dir = ensure_out_dir(cfg);

    std::vector<example2d::ScanReport> reports(cfg.n_seeds);
    parallel_for(cfg.n_seeds, cfg.workers, [&](std::size_t s) {
        example2d::ScanParams params;
        params.x1_min = cfg.scan_x1_min;
        params.x1_max = cfg.scan_x1_max;
        params.n_points = cfg.scan_points;
        params.x2 = cfg.scan_x2;
        params.t = cfg.scan_t;
        params.dt = cfg.dt;
        params.seed = cfg.seed + s;
        params.workers = 1;
        reports[s] = example2d::scan_discontinuity(params);
    });

    CommandOutcome outcome;
    for (std::size_t s = 0; s < cfg.n_seeds; ++s) {
        const example2d::ScanReport& rep = reports[s];
        const fs::path cf = dir / ("scan_s" + std::to_string(rep.seed) + ".csv");
        const fs::path jf = dir / ("scan_s" + std::to_string(rep.seed) + ".json");
        write_file(cf, scan_csv(rep));
        write_file(jf, scan_summary_json(rep).dump(2) + "\n");
        outcome.files_written.push_back(cf.string());
        outcome.files_written.push_back(jf.string());
        log << jf.string() << ": jumps=" << rep.jumps.size()
            << " hit_fraction=" << fmt17(rep.hit_fraction)
            << (rep.vacuous ? " (vacuous)" : "") << '\n';
        if (rep.monotone_violations > 0) {
            log << jf.string() << ": MONOTONICITY VIOLATIONS: " << rep.monotone_violations << '\n';
            outcome.exit_code = 1;
        }
    }
    return outcome;
}

} // namespace rflow
