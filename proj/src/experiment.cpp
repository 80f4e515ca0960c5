#include "fdk/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unistd.h>

#include "fdk/nonlinearity.hpp"

namespace fdk {

namespace fs = std::filesystem;

ExperimentConfig desk_config(int experiment) {
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    switch (experiment) {
        case 1:
            cfg.alphas = {0.1, 0.2, 1.0 / 3.0, 0.5, 0.8};
            cfg.n_list = {8, 16, 32};
            cfg.n_ref = 256;
            cfg.J_ref = 1 << 10;
            cfg.u0 = PowerLaw{-0.49};
            break;
        case 2:
            cfg.alphas = {0.2, 0.5, 0.8};
            cfg.sigmas = {1.0};
            cfg.J_list = {32, 64, 128, 256};
            cfg.n_ref = 256;
            cfg.J_ref = 1 << 12;
            cfg.u0 = PowerLaw{-0.49};
            break;
        case 3:
            cfg.alphas = {0.2, 0.5, 0.8};
            cfg.sigmas = {};  // expanded per alpha to {1, 2-alpha, 2}
            cfg.J_list = {32, 64, 128, 256};
            cfg.n_ref = 256;
            cfg.J_ref = 1 << 12;
            cfg.u0 = PowerProduct{0.51};
            break;
        default:
            throw std::invalid_argument("desk_config: experiment must be 1, 2, or 3");
    }
    return cfg;
}

ExperimentConfig paper_config(int experiment) {
    ExperimentConfig cfg = desk_config(experiment);
    if (experiment == 1) {
        cfg.n_list = {8, 16, 32, 64, 128};
        cfg.n_ref = 1 << 11;
        cfg.J_ref = 1 << 16;
    } else {
        cfg.n_ref = 1 << 11;
        cfg.J_ref = 1 << 16;
    }
    return cfg;
}

std::string cache_key(double alpha, double sigma, int J, int n_cells, const std::string& u0_text,
                      const std::string& nonlinearity, int quadrature_points) {
    // Canonical text (hex floats are exact), hashed with 64-bit FNV-1a.
    char buf[128];
    std::snprintf(buf, sizeof buf, "a=%a;s=%a;J=%d;n=%d;q=%d;", alpha, sigma, J, n_cells,
                  quadrature_points);
    std::string canon = std::string(buf) + "u0=" + u0_text + ";nl=" + nonlinearity;
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

std::string resolve_cache_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("FDK_CACHE_DIR"); env && *env) return env;
    return "fdk-cache";
}

namespace {

struct RowSpec {
    double alpha, sigma;
    int J, n_cells;
    int sweep;  // consecutive rows with the same sweep id form an order column
};

std::vector<RowSpec> enumerate_rows(const ExperimentConfig& cfg) {
    std::vector<RowSpec> rows;
    int sweep = 0;
    if (cfg.alphas.empty()) throw std::invalid_argument("run_experiment: empty alpha list");
    if (cfg.experiment == 1) {
        if (cfg.n_list.empty()) throw std::invalid_argument("run_experiment: empty h sweep");
        for (double a : cfg.alphas) {
            for (int n : cfg.n_list) rows.push_back({a, cfg.sigma_ref, cfg.J_ref, n, sweep});
            ++sweep;
        }
    } else if (cfg.experiment == 2 || cfg.experiment == 3) {
        if (cfg.J_list.empty()) throw std::invalid_argument("run_experiment: empty J sweep");
        for (double a : cfg.alphas) {
            std::vector<double> sigmas = cfg.sigmas;
            if (sigmas.empty()) {
                if (cfg.experiment == 2)
                    sigmas = {1.0};
                else
                    sigmas = {1.0, 2.0 - a, 2.0};
            }
            for (double s : sigmas) {
                for (int J : cfg.J_list) rows.push_back({a, s, J, cfg.n_ref, sweep});
                ++sweep;
            }
        }
    } else {
        throw std::invalid_argument("run_experiment: experiment must be 1, 2, or 3");
    }
    return rows;
}

void validate_reference(const ExperimentConfig& cfg) {
    if (cfg.experiment == 1) {
        for (int n : cfg.n_list) {
            if (cfg.n_ref < 4 * n || cfg.n_ref % n != 0)
                throw std::invalid_argument(
                    "run_experiment: reference mesh must be a >=4x nested refinement of every "
                    "test mesh");
        }
    } else {
        for (int J : cfg.J_list)
            if (cfg.J_ref < 4 * J)
                throw std::invalid_argument(
                    "run_experiment: reference grid must have >=4x the intervals of every test "
                    "row");
    }
}

SolverConfig make_solver_config(const ExperimentConfig& cfg, double alpha, double sigma, int J,
                                int n_cells) {
    SolverConfig sc;
    sc.mesh = build_mesh(n_cells);
    sc.grid = graded_grid(J, sigma, cfg.T);
    sc.alpha = alpha;
    sc.nonlinearity = nonlinearity_by_name(cfg.nonlinearity);
    sc.u0 = cfg.u0;
    sc.quadrature_points = cfg.quadrature_points;
    return sc;
}

// Reference solutions go through the on-disk cache: load when the header
// matches the request exactly, otherwise solve and publish atomically.
SpaceTimeSolution reference_solution(const ExperimentConfig& cfg, double alpha,
                                     const std::string& dir) {
    const std::string u0_text = u0_to_string(cfg.u0);
    const std::string key = cache_key(alpha, cfg.sigma_ref, cfg.J_ref, cfg.n_ref, u0_text,
                                      cfg.nonlinearity, cfg.quadrature_points);
    const fs::path file = fs::path(dir) / (key + ".fdk");
    if (fs::exists(file)) {
        try {
            SpaceTimeSolution sol = load_solution(file.string());
            if (sol.alpha == alpha && sol.grid.sigma == cfg.sigma_ref && sol.grid.T == cfg.T &&
                sol.grid.J == cfg.J_ref && sol.mesh.n_cells == cfg.n_ref &&
                sol.u0_text == u0_text && sol.nonlinearity_name == cfg.nonlinearity)
                return sol;
            std::cerr << "[cache] header mismatch for " << file << ", recomputing\n";
        } catch (const std::exception& e) {
            std::cerr << "[cache] unreadable " << file << " (" << e.what() << "), recomputing\n";
        }
    }
    SpaceTimeSolution sol =
        solve(make_solver_config(cfg, alpha, cfg.sigma_ref, cfg.J_ref, cfg.n_ref));
    fs::create_directories(dir);
    const fs::path tmp = file.string() + ".tmp." + std::to_string(::getpid());
    save_solution(sol, tmp.string());
    fs::rename(tmp, file);  // atomic publication
    return sol;
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

void write_csv(const ExperimentConfig& cfg, const std::vector<TableRow>& rows) {
    std::ofstream os(cfg.out_csv, std::ios::trunc);
    if (!os) throw std::runtime_error("run_experiment: cannot write " + cfg.out_csv);
    os << "experiment,alpha,sigma,J,n_cells,E0,ord0,E1,ord1,E2,ord2,E3,ord3,eta1,eta2,seconds\n";
    auto opt = [&](const std::optional<double>& v, const char* spec) {
        return v ? fmt(spec, *v) : std::string{};
    };
    for (const TableRow& r : rows) {
        os << r.experiment << ',' << fmt("%.10g", r.alpha) << ',' << fmt("%.10g", r.sigma) << ','
           << r.J << ',' << r.n_cells << ',';
        if (r.ok) {
            os << fmt("%.6e", r.err.e0) << ',' << opt(r.ord0, "%.4f") << ','
               << fmt("%.6e", r.err.e1) << ',' << opt(r.ord1, "%.4f") << ','
               << fmt("%.6e", r.err.e2) << ',' << opt(r.ord2, "%.4f") << ','
               << fmt("%.6e", r.err.e3) << ',' << opt(r.ord3, "%.4f") << ',';
        } else {
            os << ",,,,,,,,";  // failed row: error and order cells stay empty
        }
        os << opt(r.eta1, "%.6e") << ',' << opt(r.eta2, "%.6e") << ','
           << fmt("%.3f", cfg.deterministic ? 0.0 : r.seconds) << '\n';
    }
}

}  // namespace

std::vector<TableRow> run_experiment(const ExperimentConfig& cfg) {
    const std::vector<RowSpec> specs = enumerate_rows(cfg);
    validate_reference(cfg);
    const std::string dir = resolve_cache_dir(cfg.cache_dir);

    // References first, serially: one per alpha, shared across that alpha's rows.
    std::vector<double> distinct_alphas;
    for (const RowSpec& s : specs)
        if (std::find(distinct_alphas.begin(), distinct_alphas.end(), s.alpha) ==
            distinct_alphas.end())
            distinct_alphas.push_back(s.alpha);
    std::vector<SlabSequence> refs;
    refs.reserve(distinct_alphas.size());
    for (double a : distinct_alphas) refs.push_back(as_slabs(reference_solution(cfg, a, dir)));
    auto ref_of = [&](double a) -> const SlabSequence& {
        for (std::size_t i = 0; i < distinct_alphas.size(); ++i)
            if (distinct_alphas[i] == a) return refs[i];
        throw std::logic_error("run_experiment: reference lookup failed");
    };

    std::vector<TableRow> rows(specs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < specs.size();) {
            const RowSpec& s = specs[i];
            TableRow& r = rows[i];
            r.experiment = cfg.experiment;
            r.alpha = s.alpha;
            r.sigma = s.sigma;
            r.J = s.J;
            r.n_cells = s.n_cells;
            const EtaPair eta = eta_predictors(s.alpha, s.sigma, s.J);
            r.eta1 = eta.eta1;
            r.eta2 = eta.eta2;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const SpaceTimeSolution sol =
                    solve(make_solver_config(cfg, s.alpha, s.sigma, s.J, s.n_cells));
                r.err = error_report(as_slabs(sol), ref_of(s.alpha), s.alpha);
                r.ok = true;
                if (sol.stability == StabilityVerdict::warn) r.status = "stability-warning";
                r.newton_min = r.newton_max = sol.newton_iters.front();
                for (int it : sol.newton_iters) {
                    r.newton_min = std::min(r.newton_min, it);
                    r.newton_max = std::max(r.newton_max, it);
                }
            } catch (const std::exception& e) {
                r.ok = false;
                r.status = e.what();
                std::cerr << "[row] FAILED alpha=" << s.alpha << " sigma=" << s.sigma
                          << " J=" << s.J << " n=" << s.n_cells << ": " << e.what() << "\n";
            }
            r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    const int jobs = std::max(1, cfg.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    // Order columns: consecutive ok rows within a sweep, halving h or doubling J.
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (specs[i].sweep != specs[i - 1].sweep || !rows[i].ok || !rows[i - 1].ok) continue;
        const double p0 = cfg.experiment == 1 ? double(specs[i - 1].n_cells) : double(specs[i - 1].J);
        const double p1 = cfg.experiment == 1 ? double(specs[i].n_cells) : double(specs[i].J);
        auto ord = [&](double e_prev, double e_cur) -> std::optional<double> {
            if (!(e_prev > 0.0) || !(e_cur > 0.0)) return std::nullopt;
            return observed_order({{p0, e_prev}, {p1, e_cur}}).front();
        };
        rows[i].ord0 = ord(rows[i - 1].err.e0, rows[i].err.e0);
        rows[i].ord1 = ord(rows[i - 1].err.e1, rows[i].err.e1);
        rows[i].ord2 = ord(rows[i - 1].err.e2, rows[i].err.e2);
        rows[i].ord3 = ord(rows[i - 1].err.e3, rows[i].err.e3);
    }

    write_csv(cfg, rows);
    return rows;
}

}  // namespace fdk
